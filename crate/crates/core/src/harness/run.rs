use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::config::{Experiment, Family, RunConfig};
use crate::classical::{extract_asymptotics, solve_zeta, AsymptoticData, ClassicalSolution};
use crate::diagnostics::{x_t_parts, NormReport};
use crate::error::{Error, Result};
use crate::evolution::{evolve, evolve_moving, picard_solve, terminal_data, to_lab, Trajectory};
use crate::numeric::geometric_grid;
use crate::params::{ParameterChoice, ParameterReport};
use crate::profile::{gaussian_profile, hat_w, u_p, ProfileSpec};
use crate::spectral::{load_snapshot, Field, Grid};

/// Result of one experiment: a verdict and an ordered summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub summary: Vec<(String, String)>,
    /// True when the run was skipped because a completed status file existed.
    pub skipped: bool,
}

impl Outcome {
    fn new(pass: bool) -> Self {
        Outcome { pass, summary: Vec::new(), skipped: false }
    }

    fn put(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn fail(reason: &str) -> Self {
        let mut o = Outcome::new(false);
        o.put("reason", reason);
        o
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// `key=value` lines, starting with `result`.
    pub fn to_text(&self) -> String {
        let mut s = format!("result={}\n", if self.pass { "PASS" } else { "FAIL" });
        for (k, v) in &self.summary {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    fn from_text(text: &str) -> Option<Self> {
        let mut lines = text.lines();
        let pass = match lines.next()?.strip_prefix("result=")? {
            "PASS" => true,
            "FAIL" => false,
            _ => return None,
        };
        let summary = lines
            .filter_map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
            .collect();
        Some(Outcome { pass, summary, skipped: true })
    }
}

fn num(x: f64) -> String {
    crate::params::fmt_num(x)
}

const STATUS: &str = "status.txt";
const SUMMARY: &str = "summary.txt";

/// Reads a completed run's outcome, if any.
pub fn completed(dir: &Path) -> Option<Outcome> {
    let status = fs::read_to_string(dir.join(STATUS)).ok()?;
    if !status.lines().any(|l| l == "status=complete") {
        return None;
    }
    Outcome::from_text(&fs::read_to_string(dir.join(SUMMARY)).ok()?)
}

/// Runs `cfg` into `dir`, recording progress in `status.txt`.
///
/// A directory whose status file reports completion is not rerun unless `force` is set.
pub fn run_experiment(cfg: &RunConfig, dir: &Path, force: bool) -> Result<Outcome> {
    if !force {
        if let Some(o) = completed(dir) {
            return Ok(o);
        }
    }
    fs::create_dir_all(dir)?;
    fs::write(dir.join(STATUS), format!("status=running\nexperiment={}\n", cfg.experiment.name()))?;
    fs::write(dir.join("config.txt"), cfg.to_text())?;
    let result = match cfg.experiment {
        Experiment::Classical => run_classical(cfg, dir),
        Experiment::Params => run_params(cfg, dir),
        Experiment::Evolve => run_evolve(cfg, dir),
        Experiment::VerifyTheorem => run_verify_theorem(cfg, dir),
        Experiment::Picard => run_picard(cfg, dir),
    };
    match &result {
        Ok(o) => {
            fs::write(dir.join(SUMMARY), o.to_text())?;
            fs::write(
                dir.join(STATUS),
                format!(
                    "status=complete\nexperiment={}\nresult={}\n",
                    cfg.experiment.name(),
                    if o.pass { "PASS" } else { "FAIL" }
                ),
            )?;
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            fs::write(dir.join(STATUS), format!("status=failed\nexperiment={}\nerror={msg}\n", cfg.experiment.name()))?;
        }
    }
    result
}

/// Final-state data `û₊` named by the profile section.
pub fn build_u_plus(cfg: &RunConfig) -> Result<Field<f64>> {
    let p = &cfg.profile;
    match &p.family {
        Family::Gaussian { amplitude, width } => {
            let grid = Grid::centered(p.n, p.points, p.half_width)?;
            Ok(gaussian_profile(grid, *amplitude, *width))
        }
        Family::Snapshot { path } => {
            let f: Field<f64> = load_snapshot(path)?;
            if f.dim() != p.n {
                return Err(Error::validation("profile.path", format!("snapshot has dimension {}, not {}", f.dim(), p.n)));
            }
            Ok(f)
        }
    }
}

/// Classical flow on `[0, t_max]` and its large-time data.
pub fn classical_setup(cfg: &RunConfig) -> Result<(ClassicalSolution<f64>, AsymptoticData<f64>)> {
    let t_max = cfg.t_max();
    let cs = solve_zeta(&cfg.sigma.model()?, t_max, cfg.classical.tol)?;
    let lo = cfg.classical.fit_lo.unwrap_or(t_max / 100.0);
    let hi = cfg.classical.fit_hi.unwrap_or(t_max);
    let data = extract_asymptotics(&cs, (lo, hi), cfg.classical.fit_tol)?;
    Ok((cs, data))
}

/// Exponent used for the parameter report: explicit, closed form, or fitted.
pub fn lambda_of(cfg: &RunConfig) -> Result<f64> {
    if let Some(l) = cfg.parameters.lambda {
        return Ok(l);
    }
    if let Some(l) = cfg.sigma.model()?.closed_form_lambda() {
        return Ok(l);
    }
    Ok(classical_setup(cfg)?.1.lambda)
}

fn choice(cfg: &RunConfig) -> ParameterChoice<f64> {
    let q = &cfg.parameters;
    ParameterChoice { alpha: q.alpha, b: q.b, alpha_n: q.alpha_n }
}

/// The parameter report, or the reason it does not exist.
fn report_or_reason(cfg: &RunConfig, lambda: f64) -> Result<std::result::Result<ParameterReport<f64>, String>> {
    match ParameterReport::new(cfg.profile.n, lambda, choice(cfg)) {
        Ok(r) => Ok(Ok(r)),
        Err(Error::LambdaOutOfRange { lambda, threshold, .. }) => {
            Ok(Err(format!("inadmissible lambda: {lambda} >= threshold {threshold}")))
        }
        Err(Error::OutOfRange { what, value, range }) => Ok(Err(format!("inadmissible {what} = {value} ({range})"))),
        Err(e) => Err(e),
    }
}

fn write_with<F: FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>>(path: PathBuf, f: F) -> Result<()> {
    use std::io::Write;
    let mut w = BufWriter::new(fs::File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn run_classical(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let t_max = cfg.t_max();
    let cs = solve_zeta(&cfg.sigma.model()?, t_max, cfg.classical.tol)?;
    write_with(dir.join("classical.csv"), |w| cs.write_csv(w))?;
    let drift = cs.max_wronskian_drift();
    let lo = cfg.classical.fit_lo.unwrap_or(t_max / 100.0);
    let hi = cfg.classical.fit_hi.unwrap_or(t_max);
    let mut o = match extract_asymptotics(&cs, (lo, hi), cfg.classical.fit_tol) {
        Ok(d) => {
            let mut o = Outcome::new(drift <= 10.0 * cfg.classical.tol);
            o.put("lambda", num(d.lambda));
            o.put("lambda_loglog", num(d.lambda_loglog));
            o.put("c1_plus", num(d.c1_plus));
            o.put("c2_plus", num(d.c2_plus));
            o.put("c3_plus", num(d.c3_plus));
            o.put("c_plus", num(d.c_plus()));
            let r: Vec<String> = d.fit_residuals.iter().map(|&r| num(r)).collect();
            o.put("fit_residuals", r.join(" "));
            o.put("zeta1_growth_ratio", num(d.zeta1_growth_ratio()));
            o.put("zeta1_power_law", d.satisfies_assumption());
            o
        }
        Err(e @ (Error::TrappedTrajectory { .. } | Error::BadFit { .. })) => Outcome::fail(&e.to_string()),
        Err(e) => return Err(e),
    };
    if let Some(l) = cfg.sigma.model()?.closed_form_lambda() {
        o.put("lambda_closed_form", num(l));
    }
    o.put("fit_window", format!("{} {}", num(lo), num(hi)));
    o.put("wronskian_drift", num(drift));
    o.put("samples", cs.times().len());
    Ok(o)
}

pub fn run_params(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let lambda = lambda_of(cfg)?;
    match report_or_reason(cfg, lambda)? {
        Ok(r) => {
            fs::write(dir.join("params.txt"), r.to_key_value())?;
            fs::write(dir.join("params.csv"), r.to_csv())?;
            let mut o = Outcome::new(r.admissible());
            o.summary.extend(r.entries());
            Ok(o)
        }
        Err(reason) => {
            let mut o = Outcome::fail(&reason);
            o.put("lambda", num(lambda));
            Ok(o)
        }
    }
}

struct Setup {
    cs: ClassicalSolution<f64>,
    data: AsymptoticData<f64>,
    spec: ProfileSpec<f64>,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let (cs, data) = classical_setup(cfg)?;
    let spec = ProfileSpec::from_asymptotics(build_u_plus(cfg)?, cfg.profile.mu, &data)?;
    Ok(Setup { cs, data, spec })
}

fn record_times(cfg: &RunConfig) -> Vec<f64> {
    geometric_grid(cfg.window.t_start, cfg.window.t_end, cfg.window.samples_per_decade)
}

pub fn run_evolve(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let s = setup(cfg)?;
    let (t0, t1) = (cfg.window.t_start, cfg.window.t_end);
    let u0 = u_p(&s.spec, &s.cs, t0)?;
    let traj = evolve(&u0, t0, t1, &cfg.solver, s.cs.sigma(), &s.spec, &record_times(cfg))?;
    traj.export(&dir.join("trajectory"))?;
    let mut o = Outcome::new(true);
    o.put("lambda", num(s.data.lambda));
    o.put("samples", traj.len());
    o.put("steps", traj.steps);
    o.put("max_mass_drift", num(traj.max_mass_drift));
    o.put("mass_tol", num(cfg.solver.mass_tol));
    o.put("initial_l2", num(u0.l2_norm()));
    Ok(o)
}

/// Backward evolution from the truncated terminal data, error fit and parameter verdicts.
pub fn run_verify_theorem(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let n = cfg.profile.n;
    let tol = cfg.parameters.tolerance;
    // gate on the closed-form exponent before any simulation
    if let Some(l) = cfg.sigma.model()?.closed_form_lambda() {
        if let Err(reason) = report_or_reason(cfg, l)? {
            let mut o = Outcome::fail(&reason);
            o.put("lambda", num(l));
            return Ok(o);
        }
    }
    let s = setup(cfg)?;
    let lambda = s.data.lambda;
    let report = match report_or_reason(cfg, lambda)? {
        Ok(r) => r,
        Err(reason) => {
            let mut o = Outcome::fail(&reason);
            o.put("lambda", num(lambda));
            return Ok(o);
        }
    };
    fs::write(dir.join("params.txt"), report.to_key_value())?;

    let (t0, t1) = (cfg.window.t_start, cfg.window.t_end);
    let r = cfg.solver.truncation(t0)?;
    let record = record_times(cfg);
    let g_r = terminal_data(&s.spec, &s.cs, r)?;
    let traj = evolve_moving(&g_r, r, t0, &cfg.solver, &s.cs, &s.spec, &record)?;
    let mut times = Vec::new();
    let mut diffs = Vec::new();
    for (&t, g) in traj.times().iter().zip(traj.fields()) {
        if t <= t1 * (1.0 + 1e-12) {
            let d = g.sub(&hat_w(&s.spec, t)?)?;
            times.push(t);
            diffs.push(d);
        }
    }
    let errors: Vec<f64> = diffs.iter().map(|d| d.l2_norm()).collect();
    let profile_diff = Trajectory::from_samples(times.clone(), diffs, cfg.solver.clone())?;
    let lab_diff = profile_diff.map_fields(|t, g| to_lab(&s.cs, t, g))?;
    write_with(dir.join("index.csv"), |w| lab_diff.write_index(w))?;
    let parts = x_t_parts(&lab_diff, report.b, lambda, report.pair.beta_n, report.pair.alpha_n, t0)?;
    let norms = NormReport::new(times, errors.clone(), Some(parts.sup_part.clone()), Some(parts.int_part.clone()), t1 / 10.0)?;
    fs::write(dir.join("norms.csv"), norms.to_csv())?;
    fs::write(dir.join("error.svg"), norms.to_svg("||u(t) - u_p(t)||_2"))?;

    let b_est = -norms.fitted_slope;
    let b_lo = report.windows.strict.lo;
    let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
    let rate_ok = b_est >= b_lo - tol;
    let mut pass = rate_ok && report.admissible();
    if cfg.profile.mu == 0.0 {
        pass &= monotone;
    }
    let mut o = Outcome::new(pass);
    o.put("reason", if pass {
        "rate and parameter verdicts hold".to_string()
    } else if !report.admissible() {
        "parameter verdicts fail".to_string()
    } else if !rate_ok {
        format!("b_est {} below b_lo_strict {} - {}", num(b_est), num(b_lo), num(tol))
    } else {
        "error is not monotone in the linear case".to_string()
    });
    o.put("n", n);
    o.put("lambda", num(lambda));
    o.put("alpha", num(report.alpha));
    o.put("b", num(report.b));
    o.put("b_lo_nominal", num(report.windows.nominal.lo));
    o.put("b_lo_strict", num(b_lo));
    o.put("b_hi", num(report.windows.strict.hi));
    o.put("b_est", num(b_est));
    o.put("fit_constant", num(norms.fitted_constant));
    o.put("r_squared", num(norms.r_squared));
    o.put("fit_from", num(t1 / 10.0));
    o.put("tolerance", num(tol));
    o.put("t_truncate", num(r));
    o.put("x_t_norm", num(parts.norm()));
    o.put("monotone", monotone);
    o.put("admissible", report.admissible());
    o.put("steps", traj.steps);
    o.put("max_mass_drift", num(traj.max_mass_drift));
    o.put("u_plus_linf", num(s.spec.u_plus_hat().linf_norm()));
    Ok(o)
}

pub fn run_picard(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let s = setup(cfg)?;
    let sol = match picard_solve(&s.spec, &s.cs, cfg.window.t_start, &cfg.solver, cfg.n_iter) {
        Ok(sol) => sol,
        Err(Error::NoContraction { residuals }) => {
            let mut o = Outcome::fail("no contraction");
            let r: Vec<String> = residuals.iter().map(|&r| num(r)).collect();
            o.put("residuals", r.join(" "));
            return Ok(o);
        }
        Err(e) => return Err(e),
    };
    let ratios = sol.ratios();
    let mut csv = String::from("k,residual,ratio\n");
    for (k, r) in sol.residuals.iter().enumerate() {
        let q = if k == 0 { "nan".to_string() } else { num(ratios[k - 1]) };
        let _ = writeln!(csv, "{k},{},{q}", num(*r));
    }
    fs::write(dir.join("picard.csv"), csv)?;
    write_with(dir.join("index.csv"), |w| sol.trajectory.write_index(w))?;
    let contracts = ratios.iter().all(|&q| q < 1.0);
    let mut o = Outcome::new(contracts);
    o.put("lambda", num(s.data.lambda));
    o.put("iterations", sol.residuals.len());
    let r: Vec<String> = sol.residuals.iter().map(|&r| num(r)).collect();
    o.put("residuals", r.join(" "));
    let q: Vec<String> = ratios.iter().map(|&r| num(r)).collect();
    o.put("ratios", q.join(" "));
    o.put("nodes", sol.trajectory.len());
    for (k, w) in sol.warnings.iter().enumerate() {
        o.put(&format!("warning.{k}"), w);
    }
    Ok(o)
}
