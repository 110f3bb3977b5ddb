//! Time evolution of the full equation and the truncated final-state problem.

mod moving;
mod picard;
mod remainder;
mod settings;
mod strang;
mod trajectory;

pub use moving::{evolve_moving, from_lab, terminal_data, to_lab, MovingFrame};
pub use picard::{picard_solve, PicardSolution};
pub use remainder::{remainder_a, remainder_a_literal, remainder_e, remainder_e_literal, Remainder};
pub use settings::{DtControl, Quadrature, SolverSettings};
pub use strang::{evolve, free_gaussian, step_strang, LabStepper};
pub use trajectory::Trajectory;
