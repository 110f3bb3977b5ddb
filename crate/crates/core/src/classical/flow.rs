use std::io::Write;

use super::ode::{integrate, DenseStep, Tolerances};
use super::sigma::SigmaModel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(ζ₁, ζ₂, ζ₁', ζ₂')` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zeta<T> {
    pub z1: T,
    pub z2: T,
    pub dz1: T,
    pub dz2: T,
}

impl<T: Real> Zeta<T> {
    pub fn wronskian(&self) -> T {
        self.z1 * self.dz2 - self.dz1 * self.z2
    }
}

/// Fundamental solutions of `ζ'' + σ(t)ζ = 0` with `ζ₁(0)=1, ζ₁'(0)=0, ζ₂(0)=0, ζ₂'(0)=1`.
///
/// Immutable after construction. Between samples the values come from the
/// integrator's continuous extension.
#[derive(Debug, Clone)]
pub struct ClassicalSolution<T> {
    sigma: SigmaModel<T>,
    tol: T,
    t_max: T,
    times: Vec<T>,
    zeta1: Vec<T>,
    zeta2: Vec<T>,
    dzeta1: Vec<T>,
    dzeta2: Vec<T>,
    steps: Vec<DenseStep<T, 4>>,
}

/// Integrates the classical flow on `[0, t_max]`.
pub fn solve_zeta<T: Real>(sigma: &SigmaModel<T>, t_max: T, tol: T) -> Result<ClassicalSolution<T>> {
    if !(t_max > T::zero() && t_max.is_finite()) {
        return Err(Error::OutOfRange { what: "t_max", value: t_max.to_f64_lossy(), range: "(0, inf)" });
    }
    if !(tol > T::zero()) {
        return Err(Error::OutOfRange { what: "tol", value: tol.to_f64_lossy(), range: "(0, inf)" });
    }
    let rhs = |t: T, y: &[T; 4]| -> Result<[T; 4]> {
        let s = sigma.eval(t);
        if !s.is_finite() {
            return Err(Error::NonFiniteSigma { t: t.to_f64_lossy() });
        }
        Ok([y[2], y[3], -s * y[0], -s * y[1]])
    };
    let y0 = [T::one(), T::zero(), T::zero(), T::one()];
    // local control two orders tighter than the requested tolerance leaves room for global accumulation
    let inner = Tolerances { rtol: tol * T::lit(0.01), atol: tol * T::lit(0.01) };
    let steps = integrate(rhs, T::zero(), y0, t_max, &sigma.breakpoints(), inner)?;

    let mut times = Vec::with_capacity(steps.len() + 1);
    let (mut zeta1, mut zeta2, mut dzeta1, mut dzeta2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut push = |t: T, y: [T; 4]| {
        times.push(t);
        zeta1.push(y[0]);
        zeta2.push(y[1]);
        dzeta1.push(y[2]);
        dzeta2.push(y[3]);
    };
    push(T::zero(), y0);
    for s in &steps {
        push(s.t1(), s.eval(s.t1()));
    }
    Ok(ClassicalSolution { sigma: sigma.clone(), tol, t_max, times, zeta1, zeta2, dzeta1, dzeta2, steps })
}

impl<T: Real> ClassicalSolution<T> {
    pub fn sigma(&self) -> &SigmaModel<T> {
        &self.sigma
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    pub fn t_max(&self) -> T {
        self.t_max
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn zeta1(&self) -> &[T] {
        &self.zeta1
    }

    pub fn zeta2(&self) -> &[T] {
        &self.zeta2
    }

    pub fn dzeta1(&self) -> &[T] {
        &self.dzeta1
    }

    pub fn dzeta2(&self) -> &[T] {
        &self.dzeta2
    }

    pub fn sample(&self, k: usize) -> Zeta<T> {
        Zeta { z1: self.zeta1[k], z2: self.zeta2[k], dz1: self.dzeta1[k], dz2: self.dzeta2[k] }
    }

    /// Dense-output evaluation at `0 ≤ t ≤ t_max`.
    pub fn zeta_at(&self, t: T) -> Result<Zeta<T>> {
        let slack = self.t_max * T::epsilon() * T::lit(8.0);
        if !(t >= T::zero() && t <= self.t_max + slack) {
            return Err(Error::OutOfDomain { t: t.to_f64_lossy(), lo: 0.0, hi: self.t_max.to_f64_lossy() });
        }
        let t = t.min(self.t_max);
        let idx = self.steps.partition_point(|s| s.t1() < t).min(self.steps.len() - 1);
        let y = self.steps[idx].eval(t);
        Ok(Zeta { z1: y[0], z2: y[1], dz1: y[2], dz2: y[3] })
    }

    /// `ζ₁(t)/ζ₂(t)`, the curvature of the modulation `𝓜₂(t)`.
    pub fn theta(&self, t: T) -> Result<T> {
        let z = self.zeta_at(t)?;
        if z.z2 == T::zero() {
            return Err(Error::SingularFactor { t: t.to_f64_lossy(), which: "zeta2 = 0" });
        }
        Ok(z.z1 / z.z2)
    }

    /// Smallest sample time with `|ζ₂(t)| > 10⁻³ t`; the MDFM factorization is used from here on.
    pub fn t_min(&self) -> T {
        let thr = T::lit(1e-3);
        self.times
            .iter()
            .zip(&self.zeta2)
            .find(|(t, z)| **t > T::zero() && z.abs() > thr * **t)
            .map(|(t, _)| *t)
            .unwrap_or(self.t_max)
    }

    /// Largest deviation of the sampled Wronskian from 1.
    pub fn max_wronskian_drift(&self) -> T {
        (0..self.times.len())
            .map(|k| (self.sample(k).wronskian() - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    /// Columns `t,zeta1,zeta2,dzeta1,dzeta2`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,zeta1,zeta2,dzeta1,dzeta2")?;
        for k in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.times[k].to_f64_lossy(),
                self.zeta1[k].to_f64_lossy(),
                self.zeta2[k].to_f64_lossy(),
                self.dzeta1[k].to_f64_lossy(),
                self.dzeta2[k].to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_case_is_exact() {
        let cs = solve_zeta(&SigmaModel::Zero, 10.0f64, 1e-10).unwrap();
        for k in 0..cs.times().len() {
            let t = cs.times()[k];
            assert!((cs.zeta1()[k] - 1.0).abs() < 1e-14);
            assert!((cs.zeta2()[k] - t).abs() < 1e-12 * t.max(1.0));
        }
        let z = cs.zeta_at(3.5).unwrap();
        assert!((z.z1 - 1.0).abs() < 1e-14 && (z.z2 - 3.5).abs() < 1e-12);
        assert!(z.dz1.abs() < 1e-14 && (z.dz2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_coefficient_matches_trig() {
        let tol = 1e-10;
        let cs = solve_zeta(&SigmaModel::Constant(1.0f64), 10.0, tol).unwrap();
        for i in 0..=1000 {
            let t = 10.0 * i as f64 / 1000.0;
            let z = cs.zeta_at(t).unwrap();
            assert!((z.z1 - t.cos()).abs() < tol, "t={t}");
            assert!((z.z2 - t.sin()).abs() < tol);
            assert!((z.dz1 + t.sin()).abs() < tol);
            assert!((z.dz2 - t.cos()).abs() < tol);
        }
        assert!(cs.max_wronskian_drift() <= 10.0 * tol);
    }

    #[test]
    fn initial_conditions_and_domain() {
        let cs = solve_zeta(&SigmaModel::Constant(0.3f64), 5.0, 1e-9).unwrap();
        assert_eq!(cs.sample(0), Zeta { z1: 1.0, z2: 0.0, dz1: 0.0, dz2: 1.0 });
        assert!(matches!(cs.zeta_at(-0.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(cs.zeta_at(5.5), Err(Error::OutOfDomain { .. })));
        assert!(cs.zeta_at(5.0).is_ok());
    }

    #[test]
    fn bad_arguments() {
        assert!(solve_zeta(&SigmaModel::Zero, 0.0f64, 1e-9).is_err());
        assert!(solve_zeta(&SigmaModel::Zero, 1.0f64, 0.0).is_err());
        let nan = SigmaModel::Tabulated(vec![(0.0f64, f64::NAN)]);
        assert!(matches!(solve_zeta(&nan, 1.0, 1e-8), Err(Error::NonFiniteSigma { .. })));
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let cs = solve_zeta(&SigmaModel::Zero, 1.0f64, 1e-8).unwrap();
        let mut buf = Vec::new();
        cs.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,zeta1,zeta2,dzeta1,dzeta2"));
        assert_eq!(lines.count(), cs.times().len());
    }
}
