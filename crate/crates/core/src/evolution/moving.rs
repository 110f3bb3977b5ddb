//! Moving-frame propagation of `g`, where `u(t) = 𝓜₁(t)𝒟(ζ₂(t))g(t)`.
//!
//! In this frame the linear flow from `a` to `b` is `ℱ e^{i(θ(b)−θ(a))|x|²/2} ℱ⁻¹` with
//! `θ = ζ₁/ζ₂`, and the nonlinearity becomes `|ζ₂(t)|^{-1/(1-λ)} F(g)`. Both substeps are exact
//! flows, so the only error is the splitting itself.

use num_complex::Complex;

use super::settings::SolverSettings;
use super::strang::{check_mass, stop_times};
use super::trajectory::Trajectory;
use crate::classical::ClassicalSolution;
use crate::error::{Error, Result};
use crate::numeric::gauss_legendre5;
use crate::profile::{chirp_defect, hat_w, ProfileSpec};
use crate::spectral::{dilate, mdfm_factors, modulate_curvature, undilate, Field, Grid, SpectralPlan};
use crate::scalar::{cis, Real};

/// Split-step propagator for `g` on the profile grid.
pub struct MovingFrame<'a, T: Real> {
    cs: &'a ClassicalSolution<T>,
    plan: SpectralPlan<T>,
    grid: Grid<T>,
    x2: Vec<T>,
    mu: T,
    rho: T,
    power: T,
}

impl<'a, T: Real> MovingFrame<'a, T> {
    pub fn new(cs: &'a ClassicalSolution<T>, spec: &ProfileSpec<T>) -> Self {
        let grid = spec.grid().clone();
        MovingFrame {
            cs,
            plan: SpectralPlan::new(&grid),
            x2: grid.dual().radius_squared(),
            grid,
            mu: spec.mu(),
            rho: spec.rho_l(),
            power: T::one() / (T::one() - spec.lambda()),
        }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// `|ζ₂(s)|^{-1/(1-λ)}`.
    pub fn weight(&self, s: T) -> Result<T> {
        let z = mdfm_factors(self.cs, s)?;
        Ok(z.z2.abs().powf(-self.power))
    }

    /// Exact linear flow from `a` to `b`.
    pub fn kinetic(&self, g: &Field<T>, a: T, b: T) -> Result<Field<T>> {
        let d = self.cs.theta(b)? - self.cs.theta(a)?;
        Ok(self.chirp(g, d))
    }

    /// `ℱ e^{ic|x|²/2} ℱ⁻¹ g`.
    pub(crate) fn chirp(&self, g: &Field<T>, c: T) -> Field<T> {
        let mut x = self.plan.inverse_fourier(g);
        let h = T::lit(0.5) * c;
        for (z, &r2) in x.values_mut().iter_mut().zip(&self.x2) {
            *z = *z * cis(h * r2);
        }
        self.plan.fourier_to(&x, &self.grid).expect("dual grid by construction")
    }

    /// Exact nonlinear flow from `a` to `b`: phase `−μ|g|^ρ ∫_a^b |ζ₂|^{-1/(1-λ)}`.
    pub fn nonlinear(&self, g: &Field<T>, a: T, b: T) -> Result<Field<T>> {
        if self.mu == T::zero() {
            return Ok(g.clone());
        }
        let mut err = None;
        let integral = gauss_legendre5(
            |s| match self.weight(s) {
                Ok(w) => w,
                Err(e) => {
                    err.get_or_insert(e);
                    T::zero()
                }
            },
            a,
            b,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let k = self.mu * integral;
        let rho = self.rho;
        Ok(g.map(|z| {
            let m = z.norm();
            if m == T::zero() {
                z
            } else {
                z * cis(-k * m.powf(rho))
            }
        }))
    }

    /// One Strang step from `t` to `t + dt`; `dt` may be negative.
    pub fn step(&self, g: &Field<T>, t: T, dt: T) -> Result<Field<T>> {
        let mid = t + dt / T::lit(2.0);
        let end = t + dt;
        let h = self.kinetic(g, t, mid)?;
        let h = self.nonlinear(&h, t, end)?;
        self.kinetic(&h, mid, end)
    }
}

/// Marches the profile-frame state from `t0` to `t1` in either direction.
///
/// The trajectory holds `g` at `t0`, every requested time strictly between, and `t1`, in
/// increasing time order.
pub fn evolve_moving<T: Real>(
    g0: &Field<T>,
    t0: T,
    t1: T,
    settings: &SolverSettings<T>,
    cs: &ClassicalSolution<T>,
    spec: &ProfileSpec<T>,
    record: &[T],
) -> Result<Trajectory<T>> {
    settings.validate()?;
    g0.grid().check_same(spec.grid())?;
    let lo = cs.t_min();
    let hi = cs.t_max();
    for t in [t0, t1] {
        if !(t >= lo && t <= hi) {
            return Err(Error::InvalidInterval(format!(
                "moving frame needs times in [{}, {}], got {}",
                lo.to_f64_lossy(),
                hi.to_f64_lossy(),
                t.to_f64_lossy()
            )));
        }
    }
    if t0 == t1 {
        return Err(Error::InvalidInterval("empty interval".into()));
    }
    let frame = MovingFrame::new(cs, spec);
    let forward = t1 > t0;
    let stops = stop_times(t0, t1, record);
    let mut samples = vec![(t0, g0.clone().with_time(t0))];
    let m0 = g0.l2_norm();
    let mut worst = T::zero();
    let mut steps = 0;
    let mut g = g0.clone();
    let mut t = t0;
    for &stop in &stops {
        while if forward { t < stop } else { t > stop } {
            let remaining = (stop - t).abs();
            let mut h = settings.dt_at(t);
            if h >= remaining || remaining - h < h * T::lit(1e-6) {
                h = remaining;
            }
            let dt = if forward { h } else { -h };
            g = frame.step(&g, t, dt)?;
            t = if h == remaining { stop } else { t + dt };
            steps += 1;
            check_mass(&g, t, m0, settings.mass_tol, &mut worst)?;
        }
        samples.push((stop, g.clone().with_time(stop)));
    }
    if !forward {
        samples.reverse();
    }
    let (times, fields): (Vec<T>, Vec<Field<T>>) = samples.into_iter().unzip();
    let mut traj = Trajectory::from_samples(times, fields, settings.clone())?;
    traj.max_mass_drift = worst;
    traj.steps = steps;
    Ok(traj)
}

/// `u = 𝓜₁(t)𝒟(ζ₂(t))g`.
pub fn to_lab<T: Real>(cs: &ClassicalSolution<T>, t: T, g: &Field<T>) -> Result<Field<T>> {
    let z = mdfm_factors(cs, t)?;
    let d = dilate(g, z.z2)?;
    Ok(modulate_curvature(&d, z.dz2 / z.z2).with_time(t))
}

/// `g = 𝒟(ζ₂(t))⁻¹𝓜₁(t)⁻¹u`.
pub fn from_lab<T: Real>(cs: &ClassicalSolution<T>, t: T, u: &Field<T>) -> Result<Field<T>> {
    let z = mdfm_factors(cs, t)?;
    let m = modulate_curvature(u, -z.dz2 / z.z2);
    Ok(undilate(&m, z.z2)?.with_time(t))
}

/// Profile-frame state at the truncation time `R` that reproduces the truncated final-state
/// problem: `g(R) = ℱ𝓜₂(R)ℱ⁻¹ŵ(R)`.
pub fn terminal_data<T: Real>(spec: &ProfileSpec<T>, cs: &ClassicalSolution<T>, r: T) -> Result<Field<T>> {
    let w = hat_w(spec, r)?;
    let z = mdfm_factors(cs, r)?;
    let d = chirp_defect(&w, z.z1 / z.z2);
    let values: Vec<Complex<T>> = w.values().iter().zip(d.values()).map(|(a, b)| a + b).collect();
    Ok(Field::from_parts(w.grid().clone(), values, Some(r)))
}
