//! Configuration, experiment orchestration and sweeps behind the `tdho` binary.

mod config;
mod run;
mod sweep;

pub use config::{
    parse_config, ClassicalConfig, Experiment, Family, ParameterConfig, ProfileConfig, RunConfig, SigmaSpec,
    WindowConfig,
};
pub use run::{
    build_u_plus, classical_setup, completed, lambda_of, run_classical, run_evolve, run_experiment, run_params,
    run_picard, run_verify_theorem, Outcome,
};
pub use sweep::{run_sweep, sweep_configs, SWEEP_HEADER};

use crate::error::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "TDHO_OUTPUT_ROOT";

/// Exit code for an error: configuration and I/O problems are usage errors, the rest numerical.
pub fn exit_code_for(e: &Error) -> i32 {
    if e.is_usage() || matches!(e, Error::Io(_) | Error::Format(_)) {
        EXIT_USAGE
    } else {
        EXIT_NUMERICAL
    }
}
