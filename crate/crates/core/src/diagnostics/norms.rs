use crate::classical::ClassicalSolution;
use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::numeric::{geometric_grid, quadrature_weights};
use crate::scalar::Real;
use crate::spectral::{mdfm_propagator, Field, SpectralPlan};

/// `‖(1+|x|²)^{ν/2}(1−Δ)^{γ/2} f‖₂` with the Bessel potential as a Fourier multiplier.
pub fn sobolev_norm<T: Real>(f: &Field<T>, gamma: T, nu: T) -> Result<T> {
    if !(gamma >= T::zero() && nu >= T::zero()) {
        return Err(Error::OutOfRange { what: "gamma/nu", value: gamma.min(nu).to_f64_lossy(), range: "[0, inf)" });
    }
    let g = if gamma == T::zero() {
        f.clone()
    } else {
        let plan = SpectralPlan::new(f.grid());
        let mut fh = plan.fourier(f);
        let k2 = fh.grid().radius_squared();
        let h = gamma / T::lit(2.0);
        for (z, &k) in fh.values_mut().iter_mut().zip(&k2) {
            *z = *z * (T::one() + k).powf(h);
        }
        plan.inverse_fourier_to(&fh, f.grid())?
    };
    if nu == T::zero() {
        return Ok(g.l2_norm());
    }
    let x2 = g.grid().radius_squared();
    let h = nu / T::lit(2.0);
    let s = g.values().iter().zip(&x2).fold(T::zero(), |a, (z, &r)| a + z.norm_sqr() * (T::one() + r).powf(T::lit(2.0) * h));
    Ok((s * g.grid().cell_volume()).sqrt())
}

/// `‖f‖_r`, with `r = ∞` the grid maximum.
pub fn lr_norm<T: Real>(f: &Field<T>, r: T) -> T {
    if r.is_infinite() {
        f.linf_norm()
    } else if r == T::lit(2.0) {
        f.l2_norm()
    } else {
        f.lp_norm(r)
    }
}

/// `(1 + t²)^{-λ/2}`.
fn time_weight<T: Real>(t: T, lam: T) -> T {
    (T::one() + t * t).powf(-lam / T::lit(2.0))
}

/// `(∫_τ^{t_end} (1+t²)^{-λ/2} h(t)^q dt)^{1/q}` from samples of `h`, or the weighted sup for
/// `q = ∞`. A `τ` between samples is handled by linear interpolation of the integrand.
pub fn weighted_time_norm<T: Real>(times: &[T], values: &[T], q: T, lam: T, tau: T) -> Result<T> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::InsufficientSamples(format!("{} samples", times.len())));
    }
    if !(q >= T::one()) {
        return Err(Error::OutOfRange { what: "q", value: q.to_f64_lossy(), range: "[1, inf]" });
    }
    let first = times[0];
    let last = times[times.len() - 1];
    let slack = (last - first).abs() * T::lit(1e-12);
    if tau < first - slack || tau > last + slack {
        return Err(Error::InsufficientSamples(format!(
            "samples cover [{}, {}] but tau = {}",
            first.to_f64_lossy(),
            last.to_f64_lossy(),
            tau.to_f64_lossy()
        )));
    }
    let tau = tau.max(first).min(last);
    if q.is_infinite() {
        let mut best = T::zero();
        for (k, (&t, &h)) in times.iter().zip(values).enumerate() {
            if t >= tau - slack {
                best = best.max(time_weight(t, lam) * h);
            } else if k + 1 < times.len() && times[k + 1] > tau {
                let s = (tau - t) / (times[k + 1] - t);
                best = best.max(time_weight(tau, lam) * (h + (values[k + 1] - h) * s));
            }
        }
        return Ok(best);
    }
    let mut ts = Vec::with_capacity(times.len() + 1);
    let mut ys = Vec::with_capacity(times.len() + 1);
    for (k, (&t, &h)) in times.iter().zip(values).enumerate() {
        if t >= tau - slack {
            if ts.is_empty() && t > tau + slack && k > 0 {
                let s = (tau - times[k - 1]) / (t - times[k - 1]);
                let hv = values[k - 1] + (h - values[k - 1]) * s;
                ts.push(tau);
                ys.push(time_weight(tau, lam) * hv.powf(q));
            }
            ts.push(t);
            ys.push(time_weight(t, lam) * h.powf(q));
        }
    }
    if ts.len() < 2 {
        return Ok(T::zero());
    }
    let w = quadrature_weights(&ts, ts.len() >= 3);
    let integral = w.iter().zip(&ys).fold(T::zero(), |a, (&w, &y)| a + w * y);
    Ok(integral.max(T::zero()).powf(T::one() / q))
}

/// `‖F‖_{L^q((τ, t_end); L^r, λ)}` over the snapshots of a trajectory.
pub fn weighted_bochner_norm<T: Real>(traj: &Trajectory<T>, q: T, r: T, lam: T, tau: T) -> Result<T> {
    if !(r >= T::lit(2.0)) {
        return Err(Error::OutOfRange { what: "r", value: r.to_f64_lossy(), range: "[2, inf]" });
    }
    let values: Vec<T> = traj.fields().iter().map(|f| lr_norm(f, r)).collect();
    weighted_time_norm(traj.times(), &values, q, lam, tau)
}

/// The two pieces of the `X_T` norm at each sampled `τ ≥ T`.
#[derive(Debug, Clone, PartialEq)]
pub struct XtParts<T> {
    pub taus: Vec<T>,
    /// `τ^b ‖φ‖_{∞,2,λ,τ}`.
    pub sup_part: Vec<T>,
    /// `τ^{b−2λ} ‖φ‖_{β_n,α_n,λ,τ}`.
    pub int_part: Vec<T>,
}

impl<T: Real> XtParts<T> {
    pub fn norm(&self) -> T {
        let m = |v: &[T]| v.iter().copied().fold(T::zero(), T::max);
        m(&self.sup_part) + m(&self.int_part)
    }
}

/// Per-`τ` pieces of the `X_T` norm over the sample times of `traj_diff` from `t_start` on.
pub fn x_t_parts<T: Real>(
    traj_diff: &Trajectory<T>,
    b: T,
    lam: T,
    beta_n: T,
    alpha_n: T,
    t_start: T,
) -> Result<XtParts<T>> {
    let times = traj_diff.times();
    if times.len() < 2 {
        return Err(Error::InsufficientSamples("X_T norm needs at least two samples".into()));
    }
    let l2: Vec<T> = traj_diff.fields().iter().map(|f| f.l2_norm()).collect();
    let lr: Vec<T> = traj_diff.fields().iter().map(|f| lr_norm(f, alpha_n)).collect();
    let mut parts = XtParts { taus: Vec::new(), sup_part: Vec::new(), int_part: Vec::new() };
    let slack = times[times.len() - 1] * T::lit(1e-12);
    for &tau in times.iter().filter(|&&t| t >= t_start - slack) {
        parts.taus.push(tau);
        parts.sup_part.push(tau.powf(b) * weighted_time_norm(times, &l2, T::infinity(), lam, tau)?);
        parts
            .int_part
            .push(tau.powf(b - T::lit(2.0) * lam) * weighted_time_norm(times, &lr, beta_n, lam, tau)?);
    }
    if parts.taus.is_empty() {
        return Err(Error::InsufficientSamples(format!("no samples at or after T = {}", t_start.to_f64_lossy())));
    }
    Ok(parts)
}

/// Discrete `X_T` norm: sup over sampled `τ ≥ T` of both weighted pieces.
pub fn x_t_norm<T: Real>(traj_diff: &Trajectory<T>, b: T, lam: T, beta_n: T, alpha_n: T, t_start: T) -> Result<T> {
    Ok(x_t_parts(traj_diff, b, lam, beta_n, alpha_n, t_start)?.norm())
}

/// `‖U₀(·,0)φ‖_{L^q((a,b); L^r, λ)} / ‖φ‖₂` sampled on a geometric time grid.
pub fn strichartz_ratio<T: Real>(
    cs: &ClassicalSolution<T>,
    phi: &Field<T>,
    q: T,
    r: T,
    lam: T,
    window: (T, T),
) -> Result<T> {
    let n = T::from_usize_lossy(phi.dim());
    let lhs = if q.is_infinite() { T::zero() } else { T::one() / q };
    let rhs = if r.is_infinite() { T::zero() } else { n / (T::lit(2.0) * r) };
    if !(q >= T::lit(2.0) && r >= T::lit(2.0)) || (lhs + rhs - n / T::lit(4.0)).abs() > T::lit(1e-12) {
        return Err(Error::InadmissiblePair { q: q.to_f64_lossy(), r: r.to_f64_lossy(), n: phi.dim() });
    }
    let (a, b) = window;
    if !(b > a && a >= cs.t_min()) {
        return Err(Error::InvalidInterval(format!(
            "window [{}, {}] must lie in the MDFM domain from {}",
            a.to_f64_lossy(),
            b.to_f64_lossy(),
            cs.t_min().to_f64_lossy()
        )));
    }
    let times = geometric_grid(a, b, 100);
    let values = times
        .iter()
        .map(|&t| Ok(lr_norm(&mdfm_propagator(cs, t, phi)?, r)))
        .collect::<Result<Vec<T>>>()?;
    Ok(weighted_time_norm(&times, &values, q, lam, a)? / phi.l2_norm())
}

/// `‖f‖_{L^∞}` of the Fourier transform; the amplitude controlling the smallness hypothesis.
pub fn sup_norm<T: Real>(f: &Field<T>) -> T {
    f.values().iter().map(|z| z.norm()).fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use crate::classical::{solve_zeta, SigmaModel};
    use crate::evolution::SolverSettings;
    use crate::spectral::{dilate, Grid};

    fn gauss() -> Field<f64> {
        let g = Grid::centered(1, 512, 20.0).unwrap();
        Field::from_fn(g, |x: &[f64]| Complex::new((-x[0] * x[0] / 2.0).exp(), 0.0))
    }

    #[test]
    fn sobolev_oracles() {
        let f = gauss();
        let pi = std::f64::consts::PI;
        assert!((sobolev_norm(&f, 0.0, 0.0).unwrap() - pi.powf(0.25)).abs() < 1e-12);
        assert_eq!(sobolev_norm(&f, 0.0, 0.0).unwrap(), f.l2_norm());
        let two = f.scale(Complex::new(2.0, 0.0));
        assert!((sobolev_norm(&two, 0.0, 0.0).unwrap() - 2.0 * pi.powf(0.25)).abs() < 1e-12);
        // (1 − ∂²)e^{-x²/2} = (2 − x²)e^{-x²/2}; ∫(2−x²)²e^{-x²} = (4 − 2 + 3/4)√π
        let e = (2.75 * pi.sqrt()).sqrt();
        assert!((sobolev_norm(&f, 2.0, 0.0).unwrap() - e).abs() < 1e-11);
        // ∫(1+x²)e^{-x²} = (3/2)√π
        assert!((sobolev_norm(&f, 0.0, 1.0).unwrap() - (1.5 * pi.sqrt()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dilation_scaling_of_lp() {
        let f = gauss();
        for &(tau, p) in &[(3.0, 4.0), (0.5, 3.0), (-2.0, 6.0)] {
            let d = dilate(&f, tau).unwrap();
            let e = f64::abs(tau).powf(-(0.5 - 1.0 / p)) * f.lp_norm(p);
            assert!((d.lp_norm(p) - e).abs() < 1e-13 * e);
        }
    }

    fn constant_traj(times: Vec<f64>, amp: f64) -> Trajectory<f64> {
        let g = Grid::centered(1, 8, 0.5).unwrap();
        let fields = times.iter().map(|_| Field::from_fn(g.clone(), |_| Complex::new(amp, 0.0))).collect();
        Trajectory::from_samples(times, fields, SolverSettings::default()).unwrap()
    }

    #[test]
    fn bochner_examples() {
        let tr = constant_traj((0..=10).map(|k| k as f64 / 10.0).collect(), 1.0);
        // ‖1‖_2 on [-0.5, 0.5) is 1
        assert!((weighted_bochner_norm(&tr, 1.0, 2.0, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((weighted_bochner_norm(&tr, f64::INFINITY, 2.0, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        let ts: Vec<f64> = crate::numeric::geomspace(1.0, 50.0, 401);
        let vals: Vec<f64> = ts.iter().map(|t| 1.0 / t).collect();
        let v = weighted_time_norm(&ts, &vals, 2.0, 0.0, 1.0).unwrap();
        assert!((v - (1.0 - 1.0 / 50.0f64).sqrt()).abs() < 1e-7);
        assert!(weighted_time_norm(&ts, &vals, 2.0, 0.0, 0.5).is_err());
        // τ between samples
        let v: f64 = weighted_time_norm(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0], 1.0, 0.0, 0.5).unwrap();
        assert!((v - 1.5).abs() < 1e-14);
    }

    #[test]
    fn x_t_examples() {
        let zero = constant_traj(vec![1.0, 2.0, 4.0], 0.0);
        assert_eq!(x_t_norm(&zero, 0.5, 0.0, 8.0, 4.0, 1.0).unwrap(), 0.0);
        let b = 0.7;
        let ts = crate::numeric::geomspace(10.0, 100.0, 25);
        let g = Grid::centered(1, 8, 0.5).unwrap();
        let fields = ts.iter().map(|&t: &f64| Field::from_fn(g.clone(), move |_| Complex::new(t.powf(-b), 0.0))).collect();
        let tr = Trajectory::from_samples(ts, fields, SolverSettings::default()).unwrap();
        let p = x_t_parts(&tr, b, 0.0, 8.0, 4.0, 10.0).unwrap();
        assert!(p.sup_part.iter().all(|&s| (s - 1.0).abs() < 1e-12));
        let lo = x_t_norm(&tr, b, 0.0, 8.0, 4.0, 10.0).unwrap();
        let hi = x_t_norm(&tr, 2.0 * b, 0.0, 8.0, 4.0, 10.0).unwrap();
        assert!(hi >= lo);
    }

    #[test]
    fn strichartz_examples() {
        let cs = solve_zeta(&SigmaModel::Zero, 200.0, 1e-10).unwrap();
        let g = Grid::centered(1, 1024, 30.0).unwrap();
        let phi = Field::from_fn(g, |x: &[f64]| Complex::new((-x[0] * x[0] / 2.0).exp(), 0.3 * x[0] * (-x[0] * x[0]).exp()));
        let r = strichartz_ratio(&cs, &phi, f64::INFINITY, 2.0, 0.2, (2.0, 20.0)).unwrap();
        assert!((r - (1.0 + 4.0f64).powf(-0.1)).abs() < 1e-10);
        let short = strichartz_ratio(&cs, &phi, 8.0, 4.0, 0.0, (1.0, 10.0)).unwrap();
        let long = strichartz_ratio(&cs, &phi, 8.0, 4.0, 0.0, (1.0, 100.0)).unwrap();
        assert!(short.is_finite() && ((long - short) / short).abs() < 0.05, "{short} {long}");
        let heavier = strichartz_ratio(&cs, &phi, 8.0, 4.0, 0.3, (1.0, 10.0)).unwrap();
        assert!(heavier <= short);
        assert!(matches!(strichartz_ratio(&cs, &phi, 4.0, 4.0, 0.0, (1.0, 10.0)), Err(Error::InadmissiblePair { .. })));
    }
}
