//! Norms, weighted space-time norms and rate estimation.

mod norms;
mod rates;
mod report;

pub use norms::{
    lr_norm, sobolev_norm, strichartz_ratio, sup_norm, weighted_bochner_norm, weighted_time_norm, x_t_norm, x_t_parts,
    XtParts,
};
pub use rates::{fit_decay_rate, fit_log_power, DecayFit, LogPowerFit};
pub use report::{loglog_svg, NormReport, Series};
