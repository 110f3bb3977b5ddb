//! Lab-frame Strang splitting for `i∂u = (−Δ/2 + σ(t)|x|²/2)u + μ|u|^ρ u`.

use num_complex::Complex;

use super::settings::SolverSettings;
use super::trajectory::Trajectory;
use crate::classical::SigmaModel;
use crate::error::{Error, Result};
use crate::profile::ProfileSpec;
use crate::scalar::{cis, Real};
use crate::spectral::{Field, Grid, SpectralPlan};

/// Precomputed multipliers for one grid.
pub struct LabStepper<T: Real> {
    plan: SpectralPlan<T>,
    grid: Grid<T>,
    x2: Vec<T>,
    k2: Vec<T>,
    sigma: SigmaModel<T>,
    mu: T,
    rho: T,
}

impl<T: Real> LabStepper<T> {
    pub fn new(grid: &Grid<T>, sigma: &SigmaModel<T>, mu: T, rho: T) -> Self {
        LabStepper {
            plan: SpectralPlan::new(grid),
            grid: grid.clone(),
            x2: grid.radius_squared(),
            k2: grid.dual().radius_squared(),
            sigma: sigma.clone(),
            mu,
            rho,
        }
    }

    fn kinetic(&self, f: &Field<T>, tau: T) -> Field<T> {
        let mut fh = self.plan.fourier(f);
        let h = T::lit(0.5) * tau;
        for (z, &k) in fh.values_mut().iter_mut().zip(&self.k2) {
            *z = *z * cis(-h * k);
        }
        self.plan.inverse_fourier_to(&fh, &self.grid).expect("dual grid by construction")
    }

    /// One Strang step `K(dt/2) V(dt) K(dt/2)`; `dt` may be negative.
    pub fn step(&self, f: &Field<T>, t: T, dt: T) -> Field<T> {
        let half = dt / T::lit(2.0);
        let mut g = self.kinetic(f, half);
        let s = self.sigma.eval(t + half) * T::lit(0.5);
        for (z, &r2) in g.values_mut().iter_mut().zip(&self.x2) {
            let a = z.norm();
            let nl = if a == T::zero() { T::zero() } else { self.mu * a.powf(self.rho) };
            *z = *z * cis(-(s * r2 + nl) * dt);
        }
        self.kinetic(&g, half)
    }
}

/// One Strang step of size `dt > 0` from time `t`.
pub fn step_strang<T: Real>(
    f: &Field<T>,
    t: T,
    dt: T,
    sigma: &SigmaModel<T>,
    spec: &ProfileSpec<T>,
) -> Result<Field<T>> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidInterval(format!("dt = {} must be positive", dt.to_f64_lossy())));
    }
    let out = LabStepper::new(f.grid(), sigma, spec.mu(), spec.rho_l()).step(f, t, dt);
    if !out.all_finite() {
        return Err(Error::NonFinite { t: (t + dt).to_f64_lossy() });
    }
    Ok(out.with_time(t + dt))
}

/// Marches `f0` from `t0` to `t1 > t0` and stores `t0`, every requested time in `(t0, t1)`, and `t1`.
pub fn evolve<T: Real>(
    f0: &Field<T>,
    t0: T,
    t1: T,
    settings: &SolverSettings<T>,
    sigma: &SigmaModel<T>,
    spec: &ProfileSpec<T>,
    record: &[T],
) -> Result<Trajectory<T>> {
    settings.validate()?;
    if !(t1 > t0 && t0 >= T::zero()) {
        return Err(Error::InvalidInterval(format!("need t1 > t0 >= 0, got [{}, {}]", t0.to_f64_lossy(), t1.to_f64_lossy())));
    }
    let stepper = LabStepper::new(f0.grid(), sigma, spec.mu(), spec.rho_l());
    let stops = stop_times(t0, t1, record);
    let mut traj = Trajectory::new(settings.clone());
    traj.push(t0, f0.clone());
    let m0 = f0.l2_norm();
    let mut f = f0.clone();
    let mut t = t0;
    for &stop in &stops {
        while t < stop {
            let mut dt = settings.dt_at(t);
            if t + dt >= stop || (stop - t - dt) < dt * T::lit(1e-6) {
                dt = stop - t;
            }
            f = stepper.step(&f, t, dt);
            t = if dt == stop - t { stop } else { t + dt };
            traj.steps += 1;
            check_mass(&f, t, m0, settings.mass_tol, &mut traj.max_mass_drift)?;
        }
        traj.push(stop, f.clone());
    }
    Ok(traj)
}

pub(crate) fn stop_times<T: Real>(t0: T, t1: T, record: &[T]) -> Vec<T> {
    let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
    let mut stops: Vec<T> = record.iter().copied().filter(|&s| s > lo && s < hi).collect();
    stops.push(t1);
    if t0 < t1 {
        stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    } else {
        stops.sort_by(|a, b| b.partial_cmp(a).unwrap());
    }
    stops.dedup();
    stops
}

pub(crate) fn check_mass<T: Real>(f: &Field<T>, t: T, m0: T, tol: T, worst: &mut T) -> Result<()> {
    if !f.all_finite() {
        return Err(Error::NonFinite { t: t.to_f64_lossy() });
    }
    let drift = if m0 > T::zero() { (f.l2_norm() - m0).abs() / m0 } else { f.l2_norm() };
    *worst = worst.max(drift);
    if drift > tol {
        return Err(Error::MassDrift { t: t.to_f64_lossy(), drift: drift.to_f64_lossy(), tol: tol.to_f64_lossy() });
    }
    Ok(())
}

/// Closed-form free Gaussian `u(0) = e^{-|x|²/2}` under `i∂u = −Δu/2` in dimension `n`.
pub fn free_gaussian<T: Real>(grid: &Grid<T>, t: T) -> Field<T> {
    let n = grid.dim();
    let d = Complex::new(T::one(), t);
    let pre = d.powf(-T::from_usize_lossy(n) / T::lit(2.0));
    Field::from_fn(grid.clone(), move |x| {
        let r2 = x.iter().fold(T::zero(), |a, &v| a + v * v);
        pre * (-(Complex::new(r2, T::zero())) / (d * T::lit(2.0))).exp()
    })
    .with_time(t)
}
