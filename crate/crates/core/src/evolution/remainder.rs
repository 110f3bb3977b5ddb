//! Remainder terms `𝓔(t)`, `𝓐(t)` and the Duhamel integral of the final-state problem.
//!
//! Everything is evaluated in the profile frame `u = 𝓜₁(t)𝒟(ζ₂(t))g`, where `U₀(t,s)` acts as
//! `V(t)V(s)⁻¹` with `V(t) = ℱ𝓜₂(t)ℱ⁻¹`. With `w(s) = ζ₂(s)^{-1/(1-λ)}`:
//!
//! ```text
//! e(t) = (V(t) − 1)ŵ(t) − ℱ 𝓜₂(t) i∫_t^R (1 − 𝓜₂(s)⁻¹) ℱ⁻¹[w F(ŵ)] ds
//! a(t) = ℱ 𝓜₂(t) i∫_t^R (w − 1/(c₊s)) ℱ⁻¹[F(ŵ)] ds
//! ```
//!
//! The integrals are accumulated from `R` down to each node so one pass yields every node.

use num_complex::Complex;
use rayon::prelude::*;

use super::moving::{to_lab, MovingFrame};
use super::settings::SolverSettings;
use crate::classical::ClassicalSolution;
use crate::error::{Error, Result};
use crate::numeric::{geometric_grid, geomspace, interval_weights, quadrature_weights};
use crate::profile::{chirp_defect, hat_w, nonlinearity, r_op, ProfileSpec};
use crate::scalar::{cis, Real};
use crate::spectral::{inverse_fourier, mdfm_between, mdfm_factors, mdfm_propagator, Field, Grid, SpectralPlan};

type Values<T> = Vec<Complex<T>>;

/// A remainder term at one time with its error budget.
#[derive(Debug, Clone)]
pub struct Remainder<T> {
    /// Lab-frame value on the grid `ζ₂(t)·(profile grid)`.
    pub field: Field<T>,
    /// Profile-frame value on the profile grid.
    pub profile: Field<T>,
    /// Estimate of the neglected `∫_R^∞` piece, in `L²`.
    pub tail: T,
    /// `L²` change of the value when the time grid is refined twofold.
    pub quadrature_error: T,
}

/// Geometric quadrature nodes on `[t, R]` with the per-node classical data.
pub(crate) struct Nodes<'a, T: Real> {
    pub frame: MovingFrame<'a, T>,
    pub plan: SpectralPlan<T>,
    pub x2: Vec<T>,
    pub times: Vec<T>,
    pub theta: Vec<T>,
    pub weight: Vec<T>,
    pub intervals: Vec<Vec<(usize, T)>>,
    pub profile: Vec<Field<T>>,
    c_plus: T,
}

impl<'a, T: Real> Nodes<'a, T> {
    pub fn new(
        spec: &ProfileSpec<T>,
        cs: &'a ClassicalSolution<T>,
        t: T,
        r: T,
        per_decade: usize,
        simpson: bool,
    ) -> Result<Self> {
        if !(r > t) {
            return Err(Error::InvalidInterval(format!(
                "truncation {} must exceed t = {}",
                r.to_f64_lossy(),
                t.to_f64_lossy()
            )));
        }
        if r > cs.t_max() {
            return Err(Error::InvalidInterval(format!(
                "truncation {} exceeds the classical solution range {}",
                r.to_f64_lossy(),
                cs.t_max().to_f64_lossy()
            )));
        }
        let times = node_times(t, r, per_decade, simpson);
        let frame = MovingFrame::new(cs, spec);
        let mut theta = Vec::with_capacity(times.len());
        let mut weight = Vec::with_capacity(times.len());
        for &s in &times {
            let z = mdfm_factors(cs, s)?;
            if z.z2 <= T::zero() {
                return Err(Error::SingularFactor { t: s.to_f64_lossy(), which: "zeta2 must be positive" });
            }
            theta.push(z.z1 / z.z2);
            weight.push(frame.weight(s)?);
        }
        let profile = times.iter().map(|&s| hat_w(spec, s)).collect::<Result<Vec<_>>>()?;
        let grid = spec.grid().clone();
        Ok(Nodes {
            plan: SpectralPlan::new(&grid),
            x2: grid.dual().radius_squared(),
            intervals: interval_weights(&times, simpson),
            frame,
            times,
            theta,
            weight,
            profile,
            c_plus: spec.c_plus(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn grid(&self) -> &Grid<T> {
        self.frame.grid()
    }

    /// `w(s) − 1/(c₊s)`.
    fn kappa_weight(&self, j: usize) -> T {
        self.weight[j] - T::one() / (self.c_plus * self.times[j])
    }

    pub fn to_x(&self, g: &Field<T>) -> Values<T> {
        self.plan.inverse_fourier(g).into_values()
    }

    /// `e^{ic|x|²/2}` applied in place to x-space values.
    pub fn chirp_x(&self, v: &mut [Complex<T>], c: T) {
        let h = T::lit(0.5) * c;
        for (z, &r2) in v.iter_mut().zip(&self.x2) {
            *z = *z * cis(h * r2);
        }
    }

    /// `ℱ[e^{iθ_j|x|²/2} · i v]` back on the profile grid.
    pub fn lift(&self, j: usize, mut v: Values<T>) -> Field<T> {
        self.chirp_x(&mut v, self.theta[j]);
        let i = Complex::new(T::zero(), T::one());
        for z in v.iter_mut() {
            *z = *z * i;
        }
        let x = Field::from_parts(self.grid().dual(), v, None);
        self.plan.fourier_to(&x, self.grid()).expect("dual grid by construction").with_time(self.times[j])
    }

    /// `C_j = ∫_{t_j}^{R} y(s) ds` for every node, accumulated from the end in a fixed order.
    pub fn cumulative(&self, ys: &[Values<T>]) -> Vec<Values<T>> {
        let m = self.len();
        let len = ys[0].len();
        let mut out = vec![vec![Complex::new(T::zero(), T::zero()); len]; m];
        for j in (0..m - 1).rev() {
            let (head, tail) = out.split_at_mut(j + 1);
            let acc = &mut head[j];
            acc.copy_from_slice(&tail[0]);
            for &(k, w) in &self.intervals[j] {
                for (a, y) in acc.iter_mut().zip(&ys[k]) {
                    *a = *a + *y * w;
                }
            }
        }
        out
    }

    /// `ℱ⁻¹[w F(ŵ)]` and `(w − 1/(c₊s))ℱ⁻¹[F(ŵ)]` at every node.
    fn sources(&self, spec: &ProfileSpec<T>) -> Vec<(Values<T>, Values<T>)> {
        (0..self.len())
            .into_par_iter()
            .map(|j| {
                let f = self.to_x(&nonlinearity(&self.profile[j], spec));
                let w = self.weight[j];
                let k = self.kappa_weight(j);
                (f.iter().map(|z| *z * w).collect(), f.iter().map(|z| *z * k).collect())
            })
            .collect()
    }

    /// Profile-frame `e(t_j)` and `a(t_j)` at every node, plus the `L²` size of both integrands at `R`.
    pub fn remainders(&self, spec: &ProfileSpec<T>) -> (Vec<Field<T>>, Vec<Field<T>>, T, T) {
        let m = self.len();
        if spec.mu() == T::zero() {
            let e: Vec<Field<T>> = (0..m)
                .into_par_iter()
                .map(|j| chirp_defect(&self.profile[j], self.theta[j]).with_time(self.times[j]))
                .collect();
            let a = (0..m).map(|j| Field::zeros(self.grid().clone()).with_time(self.times[j])).collect();
            return (e, a, T::zero(), T::zero());
        }
        let src = self.sources(spec);
        let plain: Vec<Values<T>> = src.iter().map(|(p, _)| p.clone()).collect();
        let undone: Vec<Values<T>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut v = src[j].0.clone();
                self.chirp_x(&mut v, -self.theta[j]);
                v
            })
            .collect();
        let kappa: Vec<Values<T>> = src.iter().map(|(_, q)| q.clone()).collect();
        let dx = self.grid().dual().cell_volume();
        let norm = |v: &Values<T>| (v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()) * dx).sqrt();
        let diff_end: Values<T> = plain[m - 1].iter().zip(&undone[m - 1]).map(|(a, b)| a - b).collect();
        let e_tail = norm(&diff_end);
        let a_tail = norm(&kappa[m - 1]);

        let c_plain = self.cumulative(&plain);
        let c_undone = self.cumulative(&undone);
        let c_kappa = self.cumulative(&kappa);
        let e: Vec<Field<T>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let d: Values<T> = c_plain[j].iter().zip(&c_undone[j]).map(|(a, b)| a - b).collect();
                let integral = self.lift(j, d);
                let defect = chirp_defect(&self.profile[j], self.theta[j]);
                let v = defect.values().iter().zip(integral.values()).map(|(a, b)| a - b).collect();
                Field::from_parts(self.grid().clone(), v, Some(self.times[j]))
            })
            .collect();
        let a: Vec<Field<T>> = (0..m).into_par_iter().map(|j| self.lift(j, c_kappa[j].clone())).collect();
        (e, a, e_tail, a_tail)
    }
}

/// Geometric nodes on `[t, r]`, with an even interval count when Simpson pairs are used.
fn node_times<T: Real>(t: T, r: T, per_decade: usize, simpson: bool) -> Vec<T> {
    let times = geometric_grid(t, r, per_decade);
    if simpson && (times.len() - 1) % 2 == 1 {
        geomspace(t, r, times.len() + 1)
    } else {
        times
    }
}

/// Tail of `∫_R^∞` for an integrand of size `I(R)` decaying like `s^{-q}`.
fn tail_estimate<T: Real>(at_r: T, r: T, q: T) -> T {
    at_r * r / (q - T::one())
}

fn single_time<T: Real>(
    spec: &ProfileSpec<T>,
    cs: &ClassicalSolution<T>,
    t: T,
    settings: &SolverSettings<T>,
    pick_e: bool,
) -> Result<Remainder<T>> {
    settings.validate()?;
    let r = settings.truncation(t)?;
    let lam = spec.lambda();
    let eval = |per_decade: usize| -> Result<(Field<T>, T)> {
        let nodes = Nodes::new(spec, cs, t, r, per_decade, settings.simpson())?;
        let (e, a, e_tail, a_tail) = nodes.remainders(spec);
        Ok(if pick_e {
            // ‖(1 − 𝓜₂(s)⁻¹)·‖ ~ θ(s) ~ s^{2λ−1} on top of w ~ 1/s
            (e[0].clone(), tail_estimate(e_tail, r, T::lit(2.0) - T::lit(2.0) * lam))
        } else {
            (a[0].clone(), tail_estimate(a_tail, r, T::lit(2.0) - lam / (T::one() - lam)))
        })
    };
    let (coarse, tail) = eval(settings.nodes_per_decade)?;
    let (fine, _) = eval(2 * settings.nodes_per_decade)?;
    let quadrature_error = coarse.distance(&fine)?;
    if !coarse.all_finite() {
        return Err(Error::QuadratureFailure(format!("non-finite remainder at t = {}", t.to_f64_lossy())));
    }
    Ok(Remainder { field: to_lab(cs, t, &coarse)?, profile: coarse.with_time(t), tail, quadrature_error })
}

/// `𝓔(t) = R(t)ŵ(t) − i∫_t^R U₀(t,s)R(s)F(ŵ(s)) ds/ζ₂(s)^{1/(1-λ)}` with `R = settings.truncation(t)`.
pub fn remainder_e<T: Real>(
    spec: &ProfileSpec<T>,
    cs: &ClassicalSolution<T>,
    t: T,
    settings: &SolverSettings<T>,
) -> Result<Remainder<T>> {
    single_time(spec, cs, t, settings, true)
}

/// `𝓐(t) = i∫_t^R U₀(t,0)ℱ⁻¹(c₊s/ζ₂(s)^{1/(1-λ)} − 1)F(ŵ(s)) ds/(c₊s)`.
pub fn remainder_a<T: Real>(
    spec: &ProfileSpec<T>,
    cs: &ClassicalSolution<T>,
    t: T,
    settings: &SolverSettings<T>,
) -> Result<Remainder<T>> {
    single_time(spec, cs, t, settings, false)
}

fn literal_nodes<T: Real>(cs: &ClassicalSolution<T>, t: T, settings: &SolverSettings<T>) -> Result<(Vec<T>, Vec<T>)> {
    let r = settings.truncation(t)?;
    let s = node_times(t, r, settings.nodes_per_decade, settings.simpson());
    if r > cs.t_max() {
        return Err(Error::InvalidInterval("truncation exceeds the classical solution range".into()));
    }
    let w = quadrature_weights(&s, settings.simpson());
    Ok((s, w))
}

fn accumulate<T: Real>(acc: &mut Field<T>, term: Field<T>, c: Complex<T>) -> Result<()> {
    acc.grid().check_same(term.grid())?;
    for (a, b) in acc.values_mut().iter_mut().zip(term.values()) {
        *a = *a + *b * c;
    }
    Ok(())
}

/// [`remainder_e`] evaluated verbatim in the lab frame with `R_op` and `mdfm_between`.
pub fn remainder_e_literal<T: Real>(
    spec: &ProfileSpec<T>,
    cs: &ClassicalSolution<T>,
    t: T,
    settings: &SolverSettings<T>,
) -> Result<Field<T>> {
    let w_t = hat_w(spec, t)?;
    let mut acc = r_op(cs, t, &w_t)?;
    if spec.mu() == T::zero() {
        return Ok(acc);
    }
    let (s, q) = literal_nodes(cs, t, settings)?;
    let power = T::one() / (T::one() - spec.lambda());
    let terms = s
        .par_iter()
        .map(|&sk| -> Result<(Field<T>, T)> {
            let z = mdfm_factors(cs, sk)?;
            let inner = r_op(cs, sk, &nonlinearity(&hat_w(spec, sk)?, spec))?;
            Ok((mdfm_between(cs, t, sk, &inner)?, z.z2.powf(-power)))
        })
        .collect::<Result<Vec<_>>>()?;
    let i = Complex::new(T::zero(), T::one());
    for ((term, wk), qk) in terms.into_iter().zip(q) {
        let grid = acc.grid().clone();
        term.grid().check_same(&grid)?;
        accumulate(&mut acc, term.regrid(grid), -i * (wk * qk))?;
    }
    Ok(acc)
}

/// [`remainder_a`] evaluated verbatim in the lab frame with `mdfm_propagator`.
pub fn remainder_a_literal<T: Real>(
    spec: &ProfileSpec<T>,
    cs: &ClassicalSolution<T>,
    t: T,
    settings: &SolverSettings<T>,
) -> Result<Field<T>> {
    let (s, q) = literal_nodes(cs, t, settings)?;
    let power = T::one() / (T::one() - spec.lambda());
    let c_plus = spec.c_plus();
    let terms = s
        .par_iter()
        .map(|&sk| -> Result<Field<T>> {
            let z = mdfm_factors(cs, sk)?;
            let kappa = c_plus * sk / z.z2.powf(power) - T::one();
            let src = nonlinearity(&hat_w(spec, sk)?, spec).scale(Complex::new(kappa / (c_plus * sk), T::zero()));
            mdfm_propagator(cs, t, &inverse_fourier(&src))
        })
        .collect::<Result<Vec<_>>>()?;
    let i = Complex::new(T::zero(), T::one());
    let mut iter = terms.into_iter().zip(q);
    let (first, q0) = iter.next().expect("at least two nodes");
    let mut acc = first.scale(i * q0);
    for (term, qk) in iter {
        let grid = acc.grid().clone();
        term.grid().check_same(&grid)?;
        accumulate(&mut acc, term.regrid(grid), i * qk)?;
    }
    Ok(acc.with_time(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{solve_zeta, SigmaModel};
    use crate::profile::gaussian_profile;

    fn spec(mu: f64, lambda: f64, c2: f64) -> ProfileSpec<f64> {
        let g = Grid::centered(1, 256, 12.0).unwrap();
        ProfileSpec::new(gaussian_profile(g, 0.1, 1.0), mu, lambda, c2).unwrap()
    }

    fn settings() -> SolverSettings<f64> {
        SolverSettings { t_truncate: Some(400.0), nodes_per_decade: 40, ..Default::default() }
    }

    #[test]
    fn linear_case_reduces_to_defect() {
        let s = spec(0.0, 0.0, 1.0);
        let cs = solve_zeta(&SigmaModel::Zero, 500.0, 1e-11).unwrap();
        let e = remainder_e(&s, &cs, 10.0, &settings()).unwrap();
        let direct = r_op(&cs, 10.0, s.u_plus_hat()).unwrap();
        assert!(e.field.clone().regrid(direct.grid().clone()).distance(&direct).unwrap() < 1e-14);
        let a = remainder_a(&s, &cs, 10.0, &settings()).unwrap();
        assert_eq!(a.field.l2_norm(), 0.0);
        assert_eq!(e.tail, 0.0);
    }

    #[test]
    fn exact_power_law_has_no_a_term() {
        // σ ≡ 0 gives ζ₂ = s = c₊s exactly
        let s = spec(1.0, 0.0, 1.0);
        let cs = solve_zeta(&SigmaModel::Zero, 500.0, 1e-11).unwrap();
        let a = remainder_a(&s, &cs, 10.0, &settings()).unwrap();
        assert!(a.field.l2_norm() < 1e-15, "{}", a.field.l2_norm());
    }

    #[test]
    fn profile_route_matches_literal_route() {
        let sigma = SigmaModel::matched_inverse_square(0.09, 1.0).unwrap();
        let cs = solve_zeta(&sigma, 500.0, 1e-11).unwrap();
        let data = crate::classical::extract_asymptotics(&cs, (20.0, 500.0), 1e-6).unwrap();
        let g = Grid::centered(1, 256, 12.0).unwrap();
        let s = ProfileSpec::from_asymptotics(gaussian_profile(g, 0.1, 1.0), 2.0, &data).unwrap();
        let st = settings();
        let e = remainder_e(&s, &cs, 10.0, &st).unwrap();
        let el = remainder_e_literal(&s, &cs, 10.0, &st).unwrap();
        assert!(e.field.clone().regrid(el.grid().clone()).distance(&el).unwrap() < 1e-9 * el.l2_norm());
        let a = remainder_a(&s, &cs, 10.0, &st).unwrap();
        let al = remainder_a_literal(&s, &cs, 10.0, &st).unwrap();
        assert!(a.field.clone().regrid(al.grid().clone()).distance(&al).unwrap() < 1e-9 * al.l2_norm());
        assert!(a.quadrature_error < 1e-4 * a.field.l2_norm());
        assert!(e.quadrature_error < 1e-4 * e.field.l2_norm());
        assert!(e.tail > 0.0 && a.tail >= 0.0);
    }

    #[test]
    fn cumulative_integrates_polynomials() {
        let s = spec(0.0, 0.0, 1.0);
        let cs = solve_zeta(&SigmaModel::Zero, 500.0, 1e-11).unwrap();
        let nodes = Nodes::new(&s, &cs, 2.0, 200.0, 10, true).unwrap();
        let ys: Vec<Values<f64>> = nodes.times.iter().map(|&t| vec![Complex::new(t * t, -t)]).collect();
        let c = nodes.cumulative(&ys);
        for (j, &t) in nodes.times.iter().enumerate() {
            let re = (200f64.powi(3) - t.powi(3)) / 3.0;
            let im = -(200f64.powi(2) - t * t) / 2.0;
            assert!((c[j][0].re - re).abs() < 1e-8 * re.max(1.0), "node {j}");
            assert!((c[j][0].im - im).abs() < 1e-8 * im.abs().max(1.0));
        }
    }
}
