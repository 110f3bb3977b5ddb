use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform tensor-product grid in `n ∈ {1,2,3}` dimensions.
///
/// Point `j` on axis `a` sits at `x_min[a] + j·dx[a]`. Values are stored row-major, the last
/// axis contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    sizes: Vec<usize>,
    x_min: Vec<T>,
    dx: Vec<T>,
}

impl<T: Real> Grid<T> {
    pub fn new(sizes: Vec<usize>, x_min: Vec<T>, dx: Vec<T>) -> Result<Self> {
        let n = sizes.len();
        if !(1..=3).contains(&n) {
            return Err(Error::BadDimension(n));
        }
        if x_min.len() != n || dx.len() != n {
            return Err(Error::InvalidGrid("per-axis metadata length differs from dimension".into()));
        }
        for a in 0..n {
            if sizes[a] < 8 || !sizes[a].is_power_of_two() {
                return Err(Error::InvalidGrid(format!("axis {a}: size {} is not a power of two >= 8", sizes[a])));
            }
            if !(dx[a] > T::zero() && dx[a].is_finite()) {
                return Err(Error::InvalidGrid(format!("axis {a}: dx must be positive and finite")));
            }
            if !x_min[a].is_finite() {
                return Err(Error::InvalidGrid(format!("axis {a}: x_min must be finite")));
            }
        }
        Ok(Grid { sizes, x_min, dx })
    }

    /// Centred box `[-L, L)^n` with `size` points per axis.
    pub fn centered(n: usize, size: usize, half_width: T) -> Result<Self> {
        let dx = T::lit(2.0) * half_width / T::from_usize_lossy(size);
        Grid::new(vec![size; n], vec![-half_width; n], vec![dx; n])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn x_min(&self) -> &[T] {
        &self.x_min
    }

    pub fn dx(&self) -> &[T] {
        &self.dx
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Product of the spacings, the weight of the discrete `L²` quadrature.
    pub fn cell_volume(&self) -> T {
        self.dx.iter().fold(T::one(), |a, &d| a * d)
    }

    /// Stride between consecutive points along `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.sizes[axis + 1..].iter().product()
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<T> {
        (0..self.sizes[axis]).map(|j| self.x_min[axis] + T::from_usize_lossy(j) * self.dx[axis]).collect()
    }

    /// Origin of `axis` in units of the spacing, `x_min/dx`.
    pub fn origin_index(&self, axis: usize) -> T {
        self.x_min[axis] / self.dx[axis]
    }

    /// True when `x_min = -N/2·dx` on every axis.
    pub fn is_centered(&self) -> bool {
        (0..self.dim()).all(|a| {
            let o = self.origin_index(a);
            let c = -T::from_usize_lossy(self.sizes[a] / 2);
            (o - c).abs() <= T::lit(1e-9) * c.abs()
        })
    }

    /// Centred frequency grid with `dξ = 2π/(N dx)`.
    pub fn dual(&self) -> Self {
        let two_pi = T::lit(2.0) * T::PI();
        let dk: Vec<T> =
            self.sizes.iter().zip(&self.dx).map(|(&n, &d)| two_pi / (T::from_usize_lossy(n) * d)).collect();
        let k_min: Vec<T> = self.sizes.iter().zip(&dk).map(|(&n, &d)| -T::from_usize_lossy(n / 2) * d).collect();
        Grid { sizes: self.sizes.clone(), x_min: k_min, dx: dk }
    }

    /// `|x|²` at every point, row-major.
    pub fn radius_squared(&self) -> Vec<T> {
        let axes: Vec<Vec<T>> = (0..self.dim()).map(|a| self.axis_coords(a)).collect();
        let mut out = vec![T::zero(); self.len()];
        for (flat, r2) in out.iter_mut().enumerate() {
            let mut rem = flat;
            let mut acc = T::zero();
            for a in (0..self.dim()).rev() {
                let j = rem % self.sizes[a];
                rem /= self.sizes[a];
                acc = acc + axes[a][j] * axes[a][j];
            }
            *r2 = acc;
        }
        out
    }

    /// Coordinates of the flat index `flat`.
    pub fn point(&self, flat: usize) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim()];
        let mut rem = flat;
        for a in (0..self.dim()).rev() {
            let j = rem % self.sizes[a];
            rem /= self.sizes[a];
            x[a] = self.x_min[a] + T::from_usize_lossy(j) * self.dx[a];
        }
        x
    }

    /// Same sizes and metadata equal to relative precision `1e-12`.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let close = |a: T, b: T, scale: T| (a - b).abs() <= T::lit(1e-12) * scale;
        self.sizes == other.sizes
            && (0..self.dim()).all(|a| {
                let span = self.dx[a] * T::from_usize_lossy(self.sizes[a]);
                close(self.dx[a], other.dx[a], self.dx[a]) && close(self.x_min[a], other.x_min[a], span)
            })
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.approx_eq(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    pub(crate) fn scaled(&self, tau: T) -> Self {
        if tau > T::zero() {
            Grid {
                sizes: self.sizes.clone(),
                x_min: self.x_min.iter().map(|&x| x * tau).collect(),
                dx: self.dx.iter().map(|&d| d * tau).collect(),
            }
        } else {
            // reversed point order keeps dx positive
            let x_min = (0..self.dim())
                .map(|a| (self.x_min[a] + T::from_usize_lossy(self.sizes[a] - 1) * self.dx[a]) * tau)
                .collect();
            Grid { sizes: self.sizes.clone(), x_min, dx: self.dx.iter().map(|&d| d * tau.abs()).collect() }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Grid::<f64>::centered(4, 16, 1.0).is_err());
        assert!(Grid::<f64>::centered(1, 12, 1.0).is_err());
        assert!(Grid::<f64>::centered(1, 4, 1.0).is_err());
        assert!(Grid::new(vec![8], vec![0.0], vec![-1.0f64]).is_err());
        assert!(Grid::new(vec![8, 8], vec![0.0], vec![1.0f64]).is_err());
        assert!(Grid::<f64>::centered(3, 8, 1.0).is_ok());
    }

    #[test]
    fn dual_is_centered_and_involutive() {
        let g = Grid::<f64>::centered(2, 64, 10.0).unwrap();
        assert!(g.is_centered());
        let d = g.dual();
        assert!(d.is_centered());
        assert!((d.dx()[0] - 2.0 * std::f64::consts::PI / 20.0).abs() < 1e-15);
        assert!(d.dual().approx_eq(&g));
    }

    #[test]
    fn negative_scaling_reverses() {
        let g = Grid::new(vec![8], vec![-4.0f64], vec![1.0]).unwrap();
        let s = g.scaled(-2.0);
        assert_eq!(s.dx(), &[2.0]);
        assert_eq!(s.x_min(), &[-6.0]);
        let p = s.axis_coords(0);
        assert_eq!(p.last().copied(), Some(8.0));
    }

    #[test]
    fn radius_and_points_agree() {
        let g = Grid::new(vec![8, 16], vec![-1.0f64, -2.0], vec![0.25, 0.25]).unwrap();
        let r2 = g.radius_squared();
        for flat in [0usize, 17, 127] {
            let x = g.point(flat);
            assert!((x[0] * x[0] + x[1] * x[1] - r2[flat]).abs() < 1e-15);
        }
        assert_eq!(g.stride(0), 16);
        assert_eq!(g.stride(1), 1);
    }
}
