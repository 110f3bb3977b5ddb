//! Final-state problem for the nonlinear Schrödinger equation with a time-decaying harmonic
//! oscillator,
//!
//! ```text
//! i∂ₜu = (−Δ/2 + σ(t)|x|²/2)u + μ|u|^{2/(n(1−λ))}u,
//! ```
//!
//! in dimension `n ∈ {1, 2, 3}`. The crate solves the classical flow `ζ'' + σζ = 0`, builds the
//! modified profile `u_p`, propagates the equation, evaluates the remainder terms of the backward
//! Duhamel formula and measures decay rates against the admissible parameter windows.
//!
//! Everything numerical is generic over [`scalar::Real`] (`f32` or `f64`); the `*64` aliases
//! below fix `f64`.

pub mod classical;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod numeric;
pub mod params;
pub mod profile;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};

pub type SigmaModel64 = classical::SigmaModel<f64>;
pub type ClassicalSolution64 = classical::ClassicalSolution<f64>;
pub type AsymptoticData64 = classical::AsymptoticData<f64>;
pub type Grid64 = spectral::Grid<f64>;
pub type Field64 = spectral::Field<f64>;
pub type ProfileSpec64 = profile::ProfileSpec<f64>;
pub type SolverSettings64 = evolution::SolverSettings<f64>;
pub type Trajectory64 = evolution::Trajectory<f64>;
pub type Remainder64 = evolution::Remainder<f64>;
pub type PicardSolution64 = evolution::PicardSolution<f64>;
pub type ParameterReport64 = params::ParameterReport<f64>;
pub type NormReport64 = diagnostics::NormReport<f64>;
pub type DecayFit64 = diagnostics::DecayFit<f64>;
