//! Modified final-state profile `ŵ(t)`, the approximate solution `u_p(t)` and the defect `R(t)`.

use num_complex::Complex;

use crate::classical::{AsymptoticData, ClassicalSolution};
use crate::error::{Error, Result};
use crate::scalar::{cis, Real};
use crate::spectral::{dilate, mdfm_factors, modulate_curvature, Field, Grid, SpectralPlan};

/// Final-state data `û₊` with the coupling and the classical constants that shape the profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec<T> {
    u_plus_hat: Field<T>,
    mu: T,
    lambda: T,
    c2_plus: T,
}

impl<T: Real> ProfileSpec<T> {
    /// `μ = 0` is accepted and gives the linear problem.
    pub fn new(u_plus_hat: Field<T>, mu: T, lambda: T, c2_plus: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda < T::lit(0.5)) {
            return Err(Error::OutOfRange { what: "lambda", value: lambda.to_f64_lossy(), range: "[0, 1/2)" });
        }
        if c2_plus == T::zero() || !c2_plus.is_finite() {
            return Err(Error::OutOfRange { what: "c2_plus", value: c2_plus.to_f64_lossy(), range: "nonzero" });
        }
        if !mu.is_finite() {
            return Err(Error::OutOfRange { what: "mu", value: mu.to_f64_lossy(), range: "finite" });
        }
        if !u_plus_hat.all_finite() {
            return Err(Error::InvalidGrid("final-state data must be finite".into()));
        }
        Ok(ProfileSpec { u_plus_hat, mu, lambda, c2_plus })
    }

    pub fn from_asymptotics(u_plus_hat: Field<T>, mu: T, data: &AsymptoticData<T>) -> Result<Self> {
        Self::new(u_plus_hat, mu, data.lambda, data.c2_plus)
    }

    pub fn u_plus_hat(&self) -> &Field<T> {
        &self.u_plus_hat
    }

    pub fn grid(&self) -> &Grid<T> {
        self.u_plus_hat.grid()
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn c2_plus(&self) -> T {
        self.c2_plus
    }

    pub fn n(&self) -> usize {
        self.u_plus_hat.dim()
    }

    /// `ρ_L = 2/(n(1-λ))`.
    pub fn rho_l(&self) -> T {
        T::lit(2.0) / (T::from_usize_lossy(self.n()) * (T::one() - self.lambda))
    }

    /// `c₊ = |c₂,₊|^{1/(1-λ)}`.
    pub fn c_plus(&self) -> T {
        self.c2_plus.abs().powf(T::one() / (T::one() - self.lambda))
    }

    /// Same data with another coupling.
    pub fn with_mu(&self, mu: T) -> Self {
        ProfileSpec { mu, ..self.clone() }
    }
}

/// Gaussian final-state data `A e^{-|ξ|²/(2w²)}` on `grid`.
pub fn gaussian_profile<T: Real>(grid: Grid<T>, amplitude: T, width: T) -> Field<T> {
    let two_w2 = T::lit(2.0) * width * width;
    Field::from_fn(grid, move |x| {
        let r2 = x.iter().fold(T::zero(), |a, &v| a + v * v);
        Complex::new(amplitude * (-r2 / two_w2).exp(), T::zero())
    })
}

/// `μ|f|^ρ f` pointwise.
pub fn power_nonlinearity<T: Real>(f: &Field<T>, mu: T, rho: T) -> Field<T> {
    f.map(|z| {
        let a = z.norm();
        if a == T::zero() {
            Complex::new(T::zero(), T::zero())
        } else {
            z * (mu * a.powf(rho))
        }
    })
}

/// `F(f) = μ|f|^{ρ_L} f`.
pub fn nonlinearity<T: Real>(f: &Field<T>, spec: &ProfileSpec<T>) -> Field<T> {
    power_nonlinearity(f, spec.mu, spec.rho_l())
}

/// `ŵ(t) = û₊ e^{-iμ|û₊|^{ρ_L} log t / c₊}` for `t > 0`.
pub fn hat_w<T: Real>(spec: &ProfileSpec<T>, t: T) -> Result<Field<T>> {
    if !(t > T::zero()) {
        return Err(Error::NonpositiveTime { t: t.to_f64_lossy() });
    }
    if t == T::one() {
        return Ok(spec.u_plus_hat.clone().with_time(t));
    }
    let k = spec.mu * t.ln() / spec.c_plus();
    let rho = spec.rho_l();
    Ok(spec.u_plus_hat.map(|z| z * cis(-k * z.norm().powf(rho))).with_time(t))
}

/// Centred-difference residual `‖i(ŵ(t+h) − ŵ(t−h))/(2h) − F(ŵ(t))/(c₊t)‖₂` of the phase equation.
pub fn phase_ode_residual<T: Real>(spec: &ProfileSpec<T>, t: T, h: T) -> Result<T> {
    let plus = hat_w(spec, t + h)?;
    let minus = hat_w(spec, t - h)?;
    let w = hat_w(spec, t)?;
    let fw = nonlinearity(&w, spec);
    let i = Complex::new(T::zero(), T::one());
    let denom = spec.c_plus() * t;
    let s = plus
        .values()
        .iter()
        .zip(minus.values())
        .zip(fw.values())
        .map(|((p, m), f)| (i * (p - m) / (T::lit(2.0) * h) - f / denom).norm_sqr())
        .fold(T::zero(), |a, b| a + b);
    Ok((s * w.grid().cell_volume()).sqrt())
}

/// `u_p(t) = 𝓜(ζ₂/ζ₂') 𝒟(ζ₂) ŵ(t)`.
pub fn u_p<T: Real>(spec: &ProfileSpec<T>, cs: &ClassicalSolution<T>, t: T) -> Result<Field<T>> {
    let z = mdfm_factors(cs, t)?;
    let w = hat_w(spec, t)?;
    let d = dilate(&w, z.z2)?;
    Ok(modulate_curvature(&d, z.dz2 / z.z2).with_time(t))
}

/// `(ℱ𝓜₂(t)ℱ⁻¹ − 1)g` on the grid of `g`, with `𝓜₂(t) = 𝓜(ζ₂/ζ₁)`.
pub fn defect_profile_frame<T: Real>(cs: &ClassicalSolution<T>, t: T, g: &Field<T>) -> Result<Field<T>> {
    let z = mdfm_factors(cs, t)?;
    Ok(chirp_defect(g, z.z1 / z.z2))
}

/// `(ℱ e^{ic|x|²/2} ℱ⁻¹ − 1)g`.
pub(crate) fn chirp_defect<T: Real>(g: &Field<T>, c: T) -> Field<T> {
    let plan = SpectralPlan::new(g.grid());
    let x = plan.inverse_fourier(g);
    let x = modulate_curvature(&x, c);
    let back = plan.fourier_to(&x, g.grid()).expect("dual grid by construction");
    let values = back.values().iter().zip(g.values()).map(|(a, b)| a - b).collect();
    Field::from_parts(g.grid().clone(), values, g.time())
}

/// `R(t)g = 𝓜₁(t)𝒟(ζ₂(t))(ℱ𝓜₂(t)ℱ⁻¹ − 1)g`.
pub fn r_op<T: Real>(cs: &ClassicalSolution<T>, t: T, g: &Field<T>) -> Result<Field<T>> {
    let z = mdfm_factors(cs, t)?;
    let e = chirp_defect(g, z.z1 / z.z2);
    let d = dilate(&e, z.z2)?;
    Ok(modulate_curvature(&d, z.dz2 / z.z2).with_time(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{solve_zeta, SigmaModel};
    use crate::spectral::{inverse_fourier, mdfm_propagator};

    fn spec(mu: f64, lambda: f64) -> ProfileSpec<f64> {
        let g = Grid::centered(1, 256, 16.0).unwrap();
        ProfileSpec::new(gaussian_profile(g, 0.1, 1.0), mu, lambda, 1.0).unwrap()
    }

    #[test]
    fn nonlinearity_examples() {
        let s = spec(1.0, 0.0);
        assert_eq!(s.rho_l(), 2.0);
        let g = Grid::centered(1, 8, 1.0).unwrap();
        let two = Field::from_fn(g.clone(), |_| Complex::new(2.0, 0.0));
        let out = nonlinearity(&two, &s);
        assert!(out.values().iter().all(|z| *z == Complex::new(8.0, 0.0)));
        let zero = Field::zeros(g);
        assert_eq!(nonlinearity(&zero, &s).linf_norm(), 0.0);
    }

    #[test]
    fn hat_w_modulus_and_domain() {
        let s = spec(0.7, 0.1);
        let w1 = hat_w(&s, 1.0).unwrap();
        assert_eq!(w1.values(), s.u_plus_hat().values());
        let w = hat_w(&s, 37.0).unwrap();
        for (a, b) in w.values().iter().zip(s.u_plus_hat().values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-16);
        }
        assert!(matches!(hat_w(&s, 0.0), Err(Error::NonpositiveTime { .. })));
        assert!(matches!(hat_w(&s, -1.0), Err(Error::NonpositiveTime { .. })));
    }

    #[test]
    fn phase_ode_is_second_order() {
        let s = spec(3.0, 0.1);
        let r1 = phase_ode_residual(&s, 2.0, 1e-2).unwrap();
        let r2 = phase_ode_residual(&s, 2.0, 5e-3).unwrap();
        assert!((r1 / r2 - 4.0).abs() < 0.05, "ratio {}", r1 / r2);
    }

    #[test]
    fn u_p_free_closed_form() {
        // (it)^{-1/2} e^{ix²/(2t)} ŵ(t, x/t)
        let s = spec(1.0, 0.0);
        let cs = solve_zeta(&SigmaModel::Zero, 50.0, 1e-12).unwrap();
        let t = 7.0;
        let up = u_p(&s, &cs, t).unwrap();
        let w = hat_w(&s, t).unwrap();
        let pre = Complex::new(0.0, t).powf(-0.5);
        for (k, z) in up.values().iter().enumerate() {
            let x = up.grid().point(k)[0];
            let e = pre * cis(x * x / (2.0 * t)) * w.values()[k];
            assert!((z - e).norm() < 1e-14);
        }
        assert!((up.l2_norm() / s.u_plus_hat().l2_norm() - 1.0).abs() < 1e-13);
        assert!(up.linf_norm() <= t.powf(-0.5) * s.u_plus_hat().linf_norm() * (1.0 + 1e-14));
    }

    #[test]
    fn r_op_is_mdfm_defect() {
        let s = spec(0.0, 0.1);
        let sigma = SigmaModel::inverse_square(0.09, 1.0).unwrap();
        let cs = solve_zeta(&sigma, 30.0, 1e-11).unwrap();
        let t = 10.0;
        let g = s.u_plus_hat();
        let lhs = mdfm_propagator(&cs, t, &inverse_fourier(g)).unwrap();
        let up = u_p(&s, &cs, t).unwrap();
        let r = r_op(&cs, t, g).unwrap();
        let rhs = up.add(&r.regrid(up.grid().clone())).unwrap();
        let lhs = lhs.regrid(up.grid().clone());
        assert!(lhs.distance(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn free_defect_decreases() {
        let s = spec(0.0, 0.0);
        let cs = solve_zeta(&SigmaModel::Zero, 1e3, 1e-10).unwrap();
        let norms: Vec<f64> =
            [10.0, 20.0, 40.0, 80.0, 160.0].iter().map(|&t| r_op(&cs, t, s.u_plus_hat()).unwrap().l2_norm()).collect();
        assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
    }
}
