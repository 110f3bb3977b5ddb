//! Dormand–Prince 5(4) integrator with the free 4th-order dense output.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One accepted step together with its continuous extension.
#[derive(Debug, Clone)]
pub(crate) struct DenseStep<T, const D: usize> {
    pub t0: T,
    pub h: T,
    coeffs: [[T; D]; 5],
}

impl<T: Real, const D: usize> DenseStep<T, D> {
    pub fn t1(&self) -> T {
        self.t0 + self.h
    }

    pub fn eval(&self, t: T) -> [T; D] {
        let th = (t - self.t0) / self.h;
        let th1 = T::one() - th;
        let c = &self.coeffs;
        std::array::from_fn(|i| c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i]))))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
}

const MAX_STEPS: usize = 5_000_000;

// Butcher tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy<T: Real, const D: usize>(y: &[T; D], h: T, terms: &[(f64, &[T; D])]) -> [T; D] {
    std::array::from_fn(|i| {
        let mut acc = T::zero();
        for (c, k) in terms {
            acc = acc + T::lit(*c) * k[i];
        }
        y[i] + h * acc
    })
}

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`, restarting at every breakpoint
/// inside the interval. Returns the accepted steps in order.
pub(crate) fn integrate<T, F, const D: usize>(
    mut f: F,
    t0: T,
    y0: [T; D],
    t1: T,
    breakpoints: &[T],
    tol: Tolerances<T>,
) -> Result<Vec<DenseStep<T, D>>>
where
    T: Real,
    F: FnMut(T, &[T; D]) -> Result<[T; D]>,
{
    let mut stops: Vec<T> = breakpoints.iter().copied().filter(|&b| b > t0 && b < t1).collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.push(t1);

    let mut steps = Vec::new();
    let mut t = t0;
    let mut y = y0;
    let mut h = ((t1 - t0) * T::lit(1e-4)).min(T::lit(1e-3));
    let mut count = 0usize;
    for &stop in &stops {
        let mut k1 = f(t, &y)?;
        while t < stop {
            count += 1;
            if count > MAX_STEPS {
                return Err(Error::StepFailure { t: t.to_f64_lossy(), reason: "step budget exhausted".into() });
            }
            let mut last = false;
            if t + h >= stop {
                h = stop - t;
                last = true;
            }
            let k2 = f(t + T::lit(C2) * h, &axpy(&y, h, &[(A21, &k1)]))?;
            let k3 = f(t + T::lit(C3) * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = f(t + T::lit(C4) * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = f(t + T::lit(C5) * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
            let k6 = f(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
            let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(t + h, &y_new)?;

            let mut err = T::zero();
            for i in 0..D {
                let e = h * (T::lit(E1) * k1[i] + T::lit(E3) * k3[i] + T::lit(E4) * k4[i] + T::lit(E5) * k5[i]
                    + T::lit(E6) * k6[i]
                    + T::lit(E7) * k7[i]);
                let sk = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                err = err + (e / sk) * (e / sk);
            }
            err = (err / T::from_usize_lossy(D)).sqrt();
            if !err.is_finite() {
                return Err(Error::StepFailure { t: t.to_f64_lossy(), reason: "non-finite error estimate".into() });
            }

            let fac = if err == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
            };
            if err <= T::one() {
                let ydiff: [T; D] = std::array::from_fn(|i| y_new[i] - y[i]);
                let bspl: [T; D] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
                let c3: [T; D] = std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]);
                let c4: [T; D] = std::array::from_fn(|i| {
                    h * (T::lit(D1) * k1[i] + T::lit(D3) * k3[i] + T::lit(D4) * k4[i] + T::lit(D5) * k5[i]
                        + T::lit(D6) * k6[i]
                        + T::lit(D7) * k7[i])
                });
                steps.push(DenseStep { t0: t, h, coeffs: [y, ydiff, bspl, c3, c4] });
                t = if last { stop } else { t + h };
                y = y_new;
                k1 = k7;
                if !last {
                    h = h * fac;
                }
            } else {
                h = h * fac.min(T::one());
                if h.abs() <= T::epsilon() * T::lit(16.0) * t.abs().max(T::one()) {
                    return Err(Error::StepFailure { t: t.to_f64_lossy(), reason: "step size underflow".into() });
                }
            }
        }
        // keep the step size across the breakpoint but restart the stage derivative
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_dense_output() {
        let steps = integrate(
            |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [0.0, 1.0],
            20.0,
            &[],
            Tolerances { rtol: 1e-11, atol: 1e-11 },
        )
        .unwrap();
        let last = steps.last().unwrap();
        assert!((last.t1() - 20.0).abs() < 1e-14);
        for s in &steps {
            for k in 0..=8 {
                let t = s.t0 + s.h * (k as f64) / 8.0;
                let y = s.eval(t);
                assert!((y[0] - t.sin()).abs() < 1e-9, "t={t} err={}", y[0] - t.sin());
                assert!((y[1] - t.cos()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn breakpoints_are_step_boundaries() {
        let steps = integrate(
            |_, y: &[f64; 1]| Ok([y[0]]),
            0.0,
            [1.0],
            2.0,
            &[0.5, 1.25],
            Tolerances { rtol: 1e-10, atol: 1e-10 },
        )
        .unwrap();
        assert!(steps.iter().any(|s| (s.t1() - 0.5).abs() < 1e-15));
        assert!(steps.iter().any(|s| (s.t1() - 1.25).abs() < 1e-15));
        let y = steps.last().unwrap().eval(2.0)[0];
        assert!((y - 2f64.exp()).abs() < 1e-8);
    }
}
