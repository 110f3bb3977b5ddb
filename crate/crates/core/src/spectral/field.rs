use num_complex::Complex;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::scalar::{is_finite_c, Real};

/// Complex samples on a [`Grid`], optionally tagged with a time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
    time: Option<T>,
}

impl<T: Real> Field<T> {
    pub fn new(grid: Grid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for {} grid points", values.len(), grid.len())));
        }
        if let Some(k) = values.iter().position(|z| !is_finite_c(z)) {
            return Err(Error::InvalidGrid(format!("non-finite value at index {k}")));
        }
        Ok(Field { grid, values, time: None })
    }

    pub(crate) fn from_parts(grid: Grid<T>, values: Vec<Complex<T>>, time: Option<T>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Field { grid, values, time }
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        let len = grid.len();
        Field { grid, values: vec![Complex::new(T::zero(), T::zero()); len], time: None }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn<F: Fn(&[T]) -> Complex<T>>(grid: Grid<T>, f: F) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.point(k))).collect();
        Field { grid, values, time: None }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn time(&self) -> Option<T> {
        self.time
    }

    pub fn with_time(mut self, t: T) -> Self {
        self.time = Some(t);
        self
    }

    pub fn set_time(&mut self, t: Option<T>) {
        self.time = t;
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Grid-aware `L²` norm `(Σ|v|² Π dx)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        let s = self.values.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        (s * self.grid.cell_volume()).sqrt()
    }

    /// Grid-aware `Lᵖ` norm; `p = ∞` gives the grid maximum.
    pub fn lp_norm(&self, p: T) -> T {
        if p.is_infinite() {
            return self.linf_norm();
        }
        let s = self.values.iter().fold(T::zero(), |a, z| a + z.norm().powf(p));
        (s * self.grid.cell_volume()).powf(T::one() / p)
    }

    pub fn linf_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |a, z| a.max(z.norm()))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(is_finite_c)
    }

    pub fn map<F: Fn(Complex<T>) -> Complex<T>>(&self, f: F) -> Self {
        Field { grid: self.grid.clone(), values: self.values.iter().map(|&z| f(z)).collect(), time: self.time }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|z| z * c)
    }

    fn zip_with<F: Fn(Complex<T>, Complex<T>) -> Complex<T>>(&self, other: &Self, f: F) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { grid: self.grid.clone(), values, time: self.time })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `‖self − other‖₂` on a shared grid.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.grid.check_same(&other.grid)?;
        let s = self.values.iter().zip(&other.values).fold(T::zero(), |a, (x, y)| a + (x - y).norm_sqr());
        Ok((s * self.grid.cell_volume()).sqrt())
    }

    /// `‖self − other‖₂ / ‖other‖₂`.
    pub fn relative_distance(&self, other: &Self) -> Result<T> {
        Ok(self.distance(other)? / other.l2_norm())
    }

    /// Grid-aware `L²` inner product `⟨self, other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.grid.check_same(&other.grid)?;
        let s = self
            .values
            .iter()
            .zip(&other.values)
            .fold(Complex::new(T::zero(), T::zero()), |a, (x, y)| a + x.conj() * y);
        Ok(s * self.grid.cell_volume())
    }

    /// Replaces the grid metadata keeping the values, for grids that agree to rounding.
    pub(crate) fn regrid(mut self, grid: Grid<T>) -> Self {
        debug_assert_eq!(grid.sizes(), self.grid.sizes());
        self.grid = grid;
        self
    }
}
