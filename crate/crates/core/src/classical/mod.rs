//! Classical flow `ζ'' + σ(t)ζ = 0` underlying the linear propagator.

mod asymptotics;
mod flow;
pub(crate) mod ode;
mod sigma;

pub use asymptotics::{extract_asymptotics, AsymptoticData};
pub use flow::{solve_zeta, ClassicalSolution, Zeta};
pub use sigma::{closed_form_lambda, sigma0_for_lambda, SigmaModel};
