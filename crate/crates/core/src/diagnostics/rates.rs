use crate::error::{Error, Result};
use crate::numeric::{linear_regression, lstsq2};
use crate::scalar::Real;

/// `error ≈ C·t^{−b_est}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T> {
    pub c: T,
    pub b_est: T,
    pub r_squared: T,
}

impl<T: Real> DecayFit<T> {
    pub fn eval(&self, t: T) -> T {
        self.c * t.powf(-self.b_est)
    }
}

/// Log-log least squares on at least five positive samples spanning a decade.
pub fn fit_decay_rate<T: Real>(times: &[T], errors: &[T]) -> Result<DecayFit<T>> {
    if times.len() != errors.len() {
        return Err(Error::InsufficientSamples("times and errors differ in length".into()));
    }
    if times.len() < 5 {
        return Err(Error::InsufficientSamples(format!("{} samples, need at least 5", times.len())));
    }
    if let Some((index, &v)) = errors.iter().enumerate().find(|(_, &e)| !(e > T::zero())) {
        return Err(Error::NonPositiveError { index, value: v.to_f64_lossy() });
    }
    if let Some(&t) = times.iter().find(|&&t| !(t > T::zero())) {
        return Err(Error::NonpositiveTime { t: t.to_f64_lossy() });
    }
    let lo = times.iter().copied().fold(T::infinity(), T::min);
    let hi = times.iter().copied().fold(T::zero(), T::max);
    let span = hi / lo;
    if span < T::lit(10.0) * (T::one() - T::lit(1e-9)) {
        return Err(Error::InsufficientSpan { span: span.to_f64_lossy() });
    }
    let lx: Vec<T> = times.iter().map(|t| t.ln()).collect();
    let ly: Vec<T> = errors.iter().map(|e| e.ln()).collect();
    let fit = linear_regression(&lx, &ly);
    Ok(DecayFit { c: fit.intercept.exp(), b_est: -fit.slope, r_squared: fit.r_squared })
}

/// `y ≈ a + c·(log t)^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPowerFit<T> {
    pub power: u32,
    pub a: T,
    pub c: T,
    pub r_squared: T,
}

/// Least-squares fit of `values` against `a + c·(log t)^p`; `p = 0` is the constant model with `r² = 0`.
pub fn fit_log_power<T: Real>(times: &[T], values: &[T], power: u32) -> Result<LogPowerFit<T>> {
    if times.len() != values.len() || times.len() < 3 {
        return Err(Error::InsufficientSamples(format!("{} samples, need at least 3", times.len())));
    }
    if let Some(&t) = times.iter().find(|&&t| !(t > T::one())) {
        return Err(Error::OutOfRange { what: "t", value: t.to_f64_lossy(), range: "(1, inf)" });
    }
    let n = T::from_usize_lossy(values.len());
    let mean = values.iter().fold(T::zero(), |a, &v| a + v) / n;
    let ss_tot = values.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean));
    if power == 0 {
        return Ok(LogPowerFit { power, a: mean, c: T::zero(), r_squared: T::zero() });
    }
    let ones = vec![T::one(); times.len()];
    let basis: Vec<T> = times.iter().map(|t| t.ln().powi(power as i32)).collect();
    let (a, c, rss) = lstsq2(&ones, &basis, values);
    let r_squared = if ss_tot > T::zero() { (T::one() - rss / ss_tot).max(T::zero()) } else { T::one() };
    Ok(LogPowerFit { power, a, c, r_squared })
}
