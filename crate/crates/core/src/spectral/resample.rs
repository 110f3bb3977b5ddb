use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use super::field::Field;
use super::grid::Grid;
use crate::scalar::{cis, Real};

const CACHE_LIMIT: usize = 1 << 20;

/// Trigonometric interpolation of `f` onto `target`, axis by axis.
///
/// Points outside the source box `[x_min, x_min + (N-1)dx]` receive zero. The result keeps the
/// time tag of `f`.
pub fn resample<T: Real>(f: &Field<T>, target: &Grid<T>) -> Field<T> {
    assert_eq!(f.dim(), target.dim(), "resample across dimensions");
    let src = f.grid();
    let mut shape: Vec<usize> = src.sizes().to_vec();
    let mut data = f.values().to_vec();
    for a in 0..src.dim() {
        let n = shape[a];
        let m_out = target.sizes()[a];
        let inner: usize = shape[a + 1..].iter().product();
        let outer: usize = shape[..a].iter().product();
        let rows = Rows::new(n, src.x_min()[a], src.dx()[a], &target.axis_coords(a), outer * inner > 1);
        let fft = FftPlanner::<T>::new().plan_fft(n, FftDirection::Forward);
        let mut out = vec![Complex::new(T::zero(), T::zero()); outer * m_out * inner];
        let mut line = vec![Complex::new(T::zero(), T::zero()); n];
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); n];
        let mut row = vec![Complex::new(T::zero(), T::zero()); n];
        let inv_n = T::one() / T::from_usize_lossy(n);
        for o in 0..outer {
            for s in 0..inner {
                for j in 0..n {
                    line[j] = data[(o * n + j) * inner + s];
                }
                fft.process(&mut line);
                // coefficient of mode m = k - N/2
                for k in 0..n {
                    let m = k as i64 - (n / 2) as i64;
                    coeffs[k] = line[m.rem_euclid(n as i64) as usize] * inv_n;
                }
                for p in 0..m_out {
                    let r = match rows.get(p) {
                        Some(cached) => cached,
                        None => {
                            if !rows.fill(p, &mut row) {
                                continue;
                            }
                            &row[..]
                        }
                    };
                    if r.is_empty() {
                        continue;
                    }
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for k in 0..n {
                        acc = acc + coeffs[k] * r[k];
                    }
                    out[(o * m_out + p) * inner + s] = acc;
                }
            }
        }
        data = out;
        shape[a] = m_out;
    }
    Field::from_parts(target.clone(), data, f.time())
}

/// Evaluation rows `e^{2πi m θ_p}`, `θ_p = (y_p - x_min)/(N dx)`, with a symmetric Nyquist term.
struct Rows<T> {
    n: usize,
    theta: Vec<Option<T>>,
    cache: Option<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> Rows<T> {
    fn new(n: usize, x_min: T, dx: T, ys: &[T], reuse: bool) -> Self {
        let span = T::from_usize_lossy(n) * dx;
        let last = x_min + T::from_usize_lossy(n - 1) * dx;
        let slack = dx * T::lit(1e-9);
        let theta: Vec<Option<T>> = ys
            .iter()
            .map(|&y| if y < x_min - slack || y > last + slack { None } else { Some((y - x_min) / span) })
            .collect();
        let mut rows = Rows { n, theta, cache: None };
        if reuse && ys.len() * n <= CACHE_LIMIT {
            let mut cache = Vec::with_capacity(ys.len());
            for p in 0..ys.len() {
                let mut r = vec![Complex::new(T::zero(), T::zero()); n];
                if !rows.fill(p, &mut r) {
                    r.clear();
                }
                cache.push(r);
            }
            rows.cache = Some(cache);
        }
        rows
    }

    fn get(&self, p: usize) -> Option<&[Complex<T>]> {
        self.cache.as_ref().map(|c| &c[p][..])
    }

    fn fill(&self, p: usize, row: &mut [Complex<T>]) -> bool {
        let Some(th) = self.theta[p] else { return false };
        let two_pi = T::lit(2.0) * T::PI();
        let half = (self.n / 2) as i64;
        // re-anchor the recurrence every 32 modes
        let w = cis(two_pi * th);
        let mut z = Complex::new(T::zero(), T::zero());
        for k in 0..self.n {
            let m = k as i64 - half;
            if k % 32 == 0 {
                z = cis(two_pi * th * T::from_i64(m).expect("mode index"));
            } else {
                z = z * w;
            }
            row[k] = z;
        }
        // Nyquist mode as cos(π N θ)
        let c = (two_pi * th * T::from_i64(half).expect("mode index")).cos();
        row[0] = Complex::new(c, T::zero());
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_own_grid_and_bandlimited_data() {
        let g = Grid::centered(1, 64, 10.0).unwrap();
        let f = Field::from_fn(g.clone(), |x: &[f64]| Complex::new((-x[0] * x[0] / 4.0).exp(), 0.0));
        let same = resample(&f, &g);
        assert!(same.relative_distance(&f).unwrap() < 1e-13);
        let fine = Grid::new(vec![256], vec![-9.0f64], vec![0.07]).unwrap();
        let r = resample(&f, &fine);
        for (k, z) in r.values().iter().enumerate() {
            let x = fine.point(k)[0];
            assert!((z.re - (-x * x / 4.0).exp()).abs() < 1e-9 && z.im.abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn outside_box_is_zero_and_2d_agrees() {
        let g = Grid::centered(2, 32, 8.0).unwrap();
        let f = Field::from_fn(g, |x: &[f64]| Complex::new((-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp(), x[1] * (-x[1] * x[1]).exp()));
        let t = Grid::new(vec![16, 8], vec![-3.3f64, -20.0], vec![0.41, 5.0]).unwrap();
        let r = resample(&f, &t);
        for k in 0..t.len() {
            let x = t.point(k);
            let e = if x[1].abs() > 8.0 {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new((-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp(), x[1] * (-x[1] * x[1]).exp())
            };
            assert!((r.values()[k] - e).norm() < 1e-8, "x = {x:?}");
        }
    }
}
