use num_complex::Complex;

use super::field::Field;
use crate::error::{Error, Result};
use crate::scalar::{cis, Real};

/// `𝓜(τ)`: multiplication by `e^{i|x|²/(2τ)}`.
pub fn modulate<T: Real>(f: &Field<T>, tau: T) -> Result<Field<T>> {
    if tau == T::zero() {
        return Err(Error::ZeroTau);
    }
    Ok(modulate_curvature(f, T::one() / tau))
}

/// Multiplication by `e^{i c|x|²/2}`; `c = 1/τ` gives `𝓜(τ)`, and `c = 0` is the identity.
pub fn modulate_curvature<T: Real>(f: &Field<T>, c: T) -> Field<T> {
    if c == T::zero() {
        return f.clone();
    }
    let r2 = f.grid().radius_squared();
    let half = T::lit(0.5);
    let values = f.values().iter().zip(&r2).map(|(&z, &r)| z * cis(half * c * r)).collect();
    Field::from_parts(f.grid().clone(), values, f.time())
}

/// `(iτ)^{-n/2}` on the principal branch, `arg(iτ) = ±π/2`.
pub fn dilation_factor<T: Real>(n: usize, tau: T) -> Complex<T> {
    let modulus = tau.abs().powf(-T::from_usize_lossy(n) / T::lit(2.0));
    // phase −(n/2)·arg(iτ) = ∓nπ/4
    let eighths = if tau > T::zero() { (8 - n % 8) % 8 } else { n % 8 };
    let h = T::FRAC_1_SQRT_2();
    let (o, z) = (T::one(), T::zero());
    let unit = match eighths {
        0 => Complex::new(o, z),
        1 => Complex::new(h, h),
        2 => Complex::new(z, o),
        3 => Complex::new(-h, h),
        4 => Complex::new(-o, z),
        5 => Complex::new(-h, -h),
        6 => Complex::new(z, -o),
        _ => Complex::new(h, -h),
    };
    unit * modulus
}

/// `𝒟(τ)φ(x) = (iτ)^{-n/2} φ(x/τ)`, realised by rescaling the grid metadata.
///
/// For `τ < 0` the point order is reversed so that the spacing stays positive.
pub fn dilate<T: Real>(f: &Field<T>, tau: T) -> Result<Field<T>> {
    if tau == T::zero() {
        return Err(Error::ZeroTau);
    }
    let c = dilation_factor(f.dim(), tau);
    Ok(rescale(f, tau, c))
}

/// Exact inverse of [`dilate`].
pub fn undilate<T: Real>(f: &Field<T>, tau: T) -> Result<Field<T>> {
    if tau == T::zero() {
        return Err(Error::ZeroTau);
    }
    let c = dilation_factor(f.dim(), tau).inv();
    Ok(rescale(f, T::one() / tau, c))
}

fn rescale<T: Real>(f: &Field<T>, tau: T, c: Complex<T>) -> Field<T> {
    let grid = f.grid().scaled(tau);
    let mut values: Vec<Complex<T>> = f.values().iter().map(|&z| z * c).collect();
    if tau < T::zero() {
        // reversing every axis of a row-major array reverses the flat order
        values.reverse();
    }
    Field::from_parts(grid, values, f.time())
}
