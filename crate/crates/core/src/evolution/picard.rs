//! Picard iteration on the truncated backward Duhamel equation
//! `u = u_p + i∫_t^R U₀(t,s)(F(u) − F(u_p)) ds + 𝓔 + 𝓐`.

use num_complex::Complex;
use rayon::prelude::*;

use super::moving::to_lab;
use super::remainder::Nodes;
use super::settings::SolverSettings;
use super::trajectory::Trajectory;
use crate::classical::ClassicalSolution;
use crate::error::{Error, Result};
use crate::profile::{nonlinearity, ProfileSpec};
use crate::scalar::Real;
use crate::spectral::Field;

#[derive(Debug, Clone)]
pub struct PicardSolution<T> {
    /// Lab-frame iterate on the node times, each on its own scaled grid.
    pub trajectory: Trajectory<T>,
    /// The same iterate in the profile frame, all on the profile grid.
    pub profile: Trajectory<T>,
    /// `max_j ‖u⁽ᵏ⁺¹⁾(t_j) − u⁽ᵏ⁾(t_j)‖₂` for each performed iteration.
    pub residuals: Vec<T>,
    pub warnings: Vec<String>,
}

impl<T> PicardSolution<T> {
    pub fn into_parts(self) -> (Trajectory<T>, Vec<T>) {
        (self.trajectory, self.residuals)
    }

    /// Successive residual ratios `r_{k+1}/r_k`.
    pub fn ratios(&self) -> Vec<T>
    where
        T: Real,
    {
        self.residuals.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Runs up to `n_iter` Picard sweeps on the geometric node grid over `[t_start, R]`.
///
/// Iteration stops early once the residual reaches round-off. Two consecutive residual increases
/// raise [`Error::NoContraction`].
pub fn picard_solve<T: Real>(
    spec: &ProfileSpec<T>,
    cs: &ClassicalSolution<T>,
    t_start: T,
    settings: &SolverSettings<T>,
    n_iter: usize,
) -> Result<PicardSolution<T>> {
    settings.validate()?;
    if n_iter == 0 {
        return Err(Error::validation("n_iter", "must be at least 1"));
    }
    if t_start < cs.t_min() {
        return Err(Error::InvalidInterval(format!(
            "T = {} is below the MDFM domain start {}",
            t_start.to_f64_lossy(),
            cs.t_min().to_f64_lossy()
        )));
    }
    let mut warnings = Vec::new();
    let amp = spec.u_plus_hat().linf_norm();
    if amp > T::lit(0.5) {
        warnings.push(format!("final-state data is not small: sup |u_+| = {}", amp.to_f64_lossy()));
    }
    let r = settings.truncation(t_start)?;
    let nodes = Nodes::new(spec, cs, t_start, r, settings.nodes_per_decade, settings.simpson())?;
    let m = nodes.len();
    let (e, a, _, _) = nodes.remainders(spec);
    let base: Vec<Field<T>> = (0..m)
        .map(|j| {
            let v = nodes.profile[j]
                .values()
                .iter()
                .zip(e[j].values())
                .zip(a[j].values())
                .map(|((w, e), a)| w + e + a)
                .collect();
            Field::from_parts(nodes.grid().clone(), v, Some(nodes.times[j]))
        })
        .collect();
    let source: Vec<Field<T>> = nodes.profile.par_iter().map(|w| nonlinearity(w, spec)).collect();

    let scale = nodes.profile.iter().map(|w| w.l2_norm()).fold(T::zero(), T::max);
    let floor = T::epsilon() * T::lit(100.0) * scale.max(T::min_positive_value());
    let mut current: Vec<Field<T>> = nodes.profile.clone();
    let mut residuals: Vec<T> = Vec::new();
    let mut rises = 0;
    for _ in 0..n_iter {
        let next = if residuals.is_empty() { base.clone() } else { sweep(&nodes, spec, &current, &source, &base) };
        let res = next
            .iter()
            .zip(&current)
            .map(|(a, b)| a.distance(b))
            .collect::<Result<Vec<T>>>()?
            .into_iter()
            .fold(T::zero(), T::max);
        if next.iter().any(|f| !f.all_finite()) {
            return Err(Error::NonFinite { t: t_start.to_f64_lossy() });
        }
        if let Some(&prev) = residuals.last() {
            if res >= prev {
                rises += 1;
                if rises >= 2 {
                    residuals.push(res);
                    return Err(Error::NoContraction { residuals: residuals.iter().map(|r| r.to_f64_lossy()).collect() });
                }
            } else {
                rises = 0;
            }
        }
        residuals.push(res);
        current = next;
        if res <= floor {
            break;
        }
    }

    let profile = Trajectory::from_samples(nodes.times.clone(), current, settings.clone())?;
    let lab = profile.map_fields(|t, g| to_lab(cs, t, g))?;
    Ok(PicardSolution { trajectory: lab, profile, residuals, warnings })
}

/// `g⁽ᵏ⁺¹⁾(t_j) = base_j + ℱ𝓜₂(t_j) i∫_{t_j}^R 𝓜₂(s)⁻¹ℱ⁻¹[w(F(g⁽ᵏ⁾) − F(ŵ))] ds`.
fn sweep<T: Real>(
    nodes: &Nodes<'_, T>,
    spec: &ProfileSpec<T>,
    current: &[Field<T>],
    source: &[Field<T>],
    base: &[Field<T>],
) -> Vec<Field<T>> {
    let m = nodes.len();
    let ys: Vec<Vec<Complex<T>>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let f = nonlinearity(&current[j], spec);
            let w = nodes.weight[j];
            let d = f.values().iter().zip(source[j].values()).map(|(a, b)| (a - b) * w).collect();
            let mut x = nodes.to_x(&Field::from_parts(nodes.grid().clone(), d, None));
            nodes.chirp_x(&mut x, -nodes.theta[j]);
            x
        })
        .collect();
    let cum = nodes.cumulative(&ys);
    (0..m)
        .into_par_iter()
        .map(|j| {
            let n = nodes.lift(j, cum[j].clone());
            let v = base[j].values().iter().zip(n.values()).map(|(a, b)| a + b).collect();
            Field::from_parts(nodes.grid().clone(), v, Some(nodes.times[j]))
        })
        .collect()
}
