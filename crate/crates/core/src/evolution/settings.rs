use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtControl {
    /// `dt = dt_initial`.
    Fixed,
    /// `dt = dt_initial · |t|`.
    Proportional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Trapezoid,
    Simpson,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings<T> {
    pub dt_initial: T,
    pub dt_control: DtControl,
    pub mass_tol: T,
    pub quadrature: Quadrature,
    /// Finite stand-in for `∞`; `None` means `100·T`.
    pub t_truncate: Option<T>,
    /// Density of the geometric time grid used by the Duhamel integrals.
    pub nodes_per_decade: usize,
}

impl<T: Real> Default for SolverSettings<T> {
    fn default() -> Self {
        SolverSettings {
            dt_initial: T::lit(0.01),
            dt_control: DtControl::Proportional,
            mass_tol: T::lit(1e-10),
            quadrature: Quadrature::Simpson,
            t_truncate: None,
            nodes_per_decade: 40,
        }
    }
}

impl<T: Real> SolverSettings<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_initial > T::zero() && self.dt_initial.is_finite()) {
            return Err(Error::validation("solver.dt_initial", "must be positive"));
        }
        if !(self.mass_tol > T::zero()) {
            return Err(Error::validation("solver.mass_tol", "must be positive"));
        }
        if self.nodes_per_decade < 2 {
            return Err(Error::validation("solver.nodes_per_decade", "must be at least 2"));
        }
        if let Some(r) = self.t_truncate {
            if !(r > T::zero() && r.is_finite()) {
                return Err(Error::validation("solver.t_truncate", "must be positive"));
            }
        }
        Ok(())
    }

    /// Truncation time for an experiment starting at `t_start`.
    pub fn truncation(&self, t_start: T) -> Result<T> {
        let r = self.t_truncate.unwrap_or(T::lit(100.0) * t_start);
        if !(r > t_start) {
            return Err(Error::InvalidInterval(format!(
                "t_truncate = {} must exceed the start time {}",
                r.to_f64_lossy(),
                t_start.to_f64_lossy()
            )));
        }
        Ok(r)
    }

    pub(crate) fn dt_at(&self, t: T) -> T {
        match self.dt_control {
            DtControl::Fixed => self.dt_initial,
            DtControl::Proportional => self.dt_initial * t.abs().max(T::lit(1e-3)),
        }
    }

    pub(crate) fn simpson(&self) -> bool {
        self.quadrature == Quadrature::Simpson
    }
}
