use crate::error::{Error, Result};
use crate::scalar::Real;

/// Time-dependent coefficient `σ(t)` of the harmonic potential `σ(t)|x|²/2`.
///
/// All models are even in `t`; only `t ≥ 0` is used by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaModel<T> {
    Zero,
    Constant(T),
    /// `σ₀/t²` for `|t| > r₀`, continued by the constant `σ₀` on `|t| ≤ r₀`.
    InverseSquare { sigma0: T, r0: T },
    /// `σ₀/t²` for `|t| > r₀`, with a repulsive core `σ = -kappa` on `|t| ≤ r₀`.
    ///
    /// `kappa` is fixed by the constructor so that `ζ₁(t) = (t/r₀)^λ` exactly for
    /// `t ≥ r₀`, i.e. `ζ₁` carries no `t^{1-λ}` component.
    MatchedInverseSquare { sigma0: T, r0: T, kappa: T },
    /// Piecewise-linear interpolation of `(t, σ)` knots, constant beyond the ends.
    Tabulated(Vec<(T, T)>),
}

impl<T: Real> SigmaModel<T> {
    pub fn inverse_square(sigma0: T, r0: T) -> Result<Self> {
        check_sigma0(sigma0)?;
        check_r0(r0)?;
        Ok(SigmaModel::InverseSquare { sigma0, r0 })
    }

    pub fn matched_inverse_square(sigma0: T, r0: T) -> Result<Self> {
        check_sigma0(sigma0)?;
        check_r0(r0)?;
        let lambda = closed_form_lambda(sigma0)?;
        // x tanh x = λ with x = sqrt(kappa) r0
        let (mut lo, mut hi) = (T::zero(), T::lit(2.0));
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid * mid.tanh() < lambda {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = (lo + hi) / T::lit(2.0);
        Ok(SigmaModel::MatchedInverseSquare { sigma0, r0, kappa: x * x / (r0 * r0) })
    }

    pub fn tabulated(mut knots: Vec<(T, T)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::validation("sigma.knots", "at least one knot required"));
        }
        knots.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite knot times"));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::validation("sigma.knots", "duplicate knot times"));
        }
        if knots.iter().any(|(t, s)| !t.is_finite() || !s.is_finite()) {
            return Err(Error::validation("sigma.knots", "knots must be finite"));
        }
        Ok(SigmaModel::Tabulated(knots))
    }

    pub fn eval(&self, t: T) -> T {
        let at = t.abs();
        match self {
            SigmaModel::Zero => T::zero(),
            SigmaModel::Constant(s) => *s,
            SigmaModel::InverseSquare { sigma0, r0 } => {
                if at <= *r0 {
                    *sigma0
                } else {
                    *sigma0 / (at * at)
                }
            }
            SigmaModel::MatchedInverseSquare { sigma0, r0, kappa } => {
                if at <= *r0 {
                    -*kappa
                } else {
                    *sigma0 / (at * at)
                }
            }
            SigmaModel::Tabulated(knots) => interp_knots(knots, t),
        }
    }

    /// Times at which `σ` is not smooth; the integrator restarts there.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            SigmaModel::InverseSquare { r0, .. } | SigmaModel::MatchedInverseSquare { r0, .. } => {
                vec![*r0]
            }
            SigmaModel::Tabulated(knots) => knots.iter().map(|k| k.0).collect(),
            _ => Vec::new(),
        }
    }

    /// Exponent `λ` of the power-law tail, when the model has one in closed form.
    pub fn closed_form_lambda(&self) -> Option<T> {
        match self {
            SigmaModel::Zero => Some(T::zero()),
            SigmaModel::InverseSquare { sigma0, .. } | SigmaModel::MatchedInverseSquare { sigma0, .. } => {
                closed_form_lambda(*sigma0).ok()
            }
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SigmaModel::Zero => "zero",
            SigmaModel::Constant(_) => "constant",
            SigmaModel::InverseSquare { .. } => "inverse_square",
            SigmaModel::MatchedInverseSquare { .. } => "matched_inverse_square",
            SigmaModel::Tabulated(_) => "tabulated",
        }
    }
}

fn interp_knots<T: Real>(knots: &[(T, T)], t: T) -> T {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let idx = knots.partition_point(|k| k.0 <= t);
    let (t0, s0) = knots[idx - 1];
    let (t1, s1) = knots[idx];
    let w = (t - t0) / (t1 - t0);
    s0 + w * (s1 - s0)
}

fn check_sigma0<T: Real>(sigma0: T) -> Result<()> {
    if !(sigma0 > T::zero() && sigma0 < T::lit(0.25)) {
        return Err(Error::OutOfRange {
            what: "sigma0",
            value: sigma0.to_f64_lossy(),
            range: "(0, 1/4)",
        });
    }
    Ok(())
}

fn check_r0<T: Real>(r0: T) -> Result<()> {
    if !(r0 > T::zero() && r0.is_finite()) {
        return Err(Error::OutOfRange { what: "r0", value: r0.to_f64_lossy(), range: "(0, inf)" });
    }
    Ok(())
}

/// `λ = (1 - sqrt(1 - 4σ₀))/2`, the smaller root of `m(m-1) + σ₀ = 0`.
pub fn closed_form_lambda<T: Real>(sigma0: T) -> Result<T> {
    check_sigma0(sigma0)?;
    let four = T::lit(4.0);
    // (1 - sqrt(1-4s))/2 = 2s / (1 + sqrt(1-4s)), stable as s -> 0
    Ok(T::lit(2.0) * sigma0 / (T::one() + (T::one() - four * sigma0).sqrt()))
}

/// Inverse of [`closed_form_lambda`]: `σ₀ = λ(1-λ)`.
pub fn sigma0_for_lambda<T: Real>(lambda: T) -> T {
    lambda * (T::one() - lambda)
}
