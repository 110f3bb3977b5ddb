use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{Experiment, RunConfig, SigmaSpec};
use super::run::{run_experiment, Outcome};
use crate::classical::sigma0_for_lambda;
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str = "index,lambda,alpha,b_lo_strict,b_hi,b_est,pass,status";

/// One `verify_theorem` configuration per `λ` in `base.sweep_lambdas`.
///
/// `λ = 0` uses `σ ≡ 0`; otherwise the matched inverse-square model with `σ₀ = λ(1−λ)`.
pub fn sweep_configs(base: &RunConfig, out: &Path) -> Vec<(PathBuf, RunConfig)> {
    let r0 = match base.sigma {
        SigmaSpec::InverseSquare { r0, .. } | SigmaSpec::MatchedInverseSquare { r0, .. } => r0,
        _ => 1.0,
    };
    base.sweep_lambdas
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let mut cfg = base.clone();
            cfg.experiment = Experiment::VerifyTheorem;
            cfg.sweep_lambdas.clear();
            cfg.parameters.lambda = None;
            cfg.sigma = if l == 0.0 {
                SigmaSpec::Zero
            } else {
                SigmaSpec::MatchedInverseSquare { sigma0: sigma0_for_lambda(l), r0 }
            };
            let dir = out.join(format!("run_{k:03}"));
            cfg.output_dir = Some(dir.clone());
            (dir, cfg)
        })
        .collect()
}

fn row(k: usize, lambda: f64, r: &Result<Outcome>) -> String {
    match r {
        Ok(o) => {
            let g = |key: &str| o.get(key).unwrap_or("nan").to_string();
            let status = o.get("reason").filter(|_| !o.pass).map_or("ok".to_string(), |r| clean(r));
            format!(
                "{k},{},{},{},{},{},{},{}",
                crate::params::fmt_num(lambda),
                g("alpha"),
                g("b_lo_strict"),
                g("b_hi"),
                g("b_est"),
                o.pass,
                status
            )
        }
        Err(e) => format!("{k},{},nan,nan,nan,nan,false,error: {}", crate::params::fmt_num(lambda), clean(&e.to_string())),
    }
}

fn clean(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

/// Runs every configuration on `workers` threads; rows keep the input order, so the aggregate is
/// independent of the worker count. Per-run errors become rows.
pub fn run_sweep(base: &RunConfig, out: &Path, workers: usize, force: bool) -> Result<String> {
    let runs = sweep_configs(base, out);
    fs::create_dir_all(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::validation("workers", e.to_string()))?;
    let rows: Vec<String> = pool.install(|| {
        runs.par_iter()
            .enumerate()
            .map(|(k, (dir, cfg))| row(k, base.sweep_lambdas[k], &run_experiment(cfg, dir, force)))
            .collect()
    });
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for r in rows {
        csv.push_str(&r);
        csv.push('\n');
    }
    fs::write(out.join("sweep.csv"), &csv)?;
    Ok(csv)
}
