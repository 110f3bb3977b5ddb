//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # comment
//! [run]
//! experiment = verify_theorem
//! [sigma]
//! kind = inverse_square
//! sigma0 = 0.09
//! ```
//!
//! Blank lines and `#` comments are ignored. Every key belongs to a section; unknown sections,
//! unknown keys and repeated keys are errors. Lists are comma separated.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::classical::SigmaModel;
use crate::error::{Error, Result};
use crate::evolution::{DtControl, Quadrature, SolverSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Classical,
    Params,
    Evolve,
    VerifyTheorem,
    Picard,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Classical => "classical",
            Experiment::Params => "params",
            Experiment::Evolve => "evolve",
            Experiment::VerifyTheorem => "verify_theorem",
            Experiment::Picard => "picard",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "classical" => Experiment::Classical,
            "params" => Experiment::Params,
            "evolve" => Experiment::Evolve,
            "verify" | "verify_theorem" => Experiment::VerifyTheorem,
            "picard" => Experiment::Picard,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSpec {
    Zero,
    Constant { value: f64 },
    InverseSquare { sigma0: f64, r0: f64 },
    MatchedInverseSquare { sigma0: f64, r0: f64 },
    Tabulated { knots: Vec<(f64, f64)> },
}

impl SigmaSpec {
    pub fn model(&self) -> Result<SigmaModel<f64>> {
        let named = |e: Error| match e {
            Error::OutOfRange { what, value, range } => {
                Error::validation(format!("sigma.{what}"), format!("{value} is outside {range}"))
            }
            e => e,
        };
        match self {
            SigmaSpec::Zero => Ok(SigmaModel::Zero),
            SigmaSpec::Constant { value } => Ok(SigmaModel::Constant(*value)),
            SigmaSpec::InverseSquare { sigma0, r0 } => SigmaModel::inverse_square(*sigma0, *r0).map_err(named),
            SigmaSpec::MatchedInverseSquare { sigma0, r0 } => {
                SigmaModel::matched_inverse_square(*sigma0, *r0).map_err(named)
            }
            SigmaSpec::Tabulated { knots } => SigmaModel::tabulated(knots.clone()),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            SigmaSpec::Zero => "zero",
            SigmaSpec::Constant { .. } => "constant",
            SigmaSpec::InverseSquare { .. } => "inverse_square",
            SigmaSpec::MatchedInverseSquare { .. } => "matched_inverse_square",
            SigmaSpec::Tabulated { .. } => "tabulated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Gaussian { amplitude: f64, width: f64 },
    Snapshot { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileConfig {
    pub family: Family,
    pub mu: f64,
    pub n: usize,
    pub points: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub samples_per_decade: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterConfig {
    /// Overrides the exponent derived from `σ` in the `params` experiment.
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub b: Option<f64>,
    pub alpha_n: Option<f64>,
    /// Slack on `b_est` against the strict lower bound.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalConfig {
    /// Defaults to the truncation time.
    pub t_max: Option<f64>,
    pub tol: f64,
    pub fit_lo: Option<f64>,
    pub fit_hi: Option<f64>,
    pub fit_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub sigma: SigmaSpec,
    pub profile: ProfileConfig,
    pub solver: SolverSettings<f64>,
    pub n_iter: usize,
    pub window: WindowConfig,
    pub parameters: ParameterConfig,
    pub classical: ClassicalConfig,
    pub sweep_lambdas: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: Experiment::Params,
            output_dir: None,
            seed: 0,
            sigma: SigmaSpec::Zero,
            profile: ProfileConfig {
                family: Family::Gaussian { amplitude: 0.05, width: 1.0 },
                mu: 0.01,
                n: 1,
                points: 1024,
                half_width: 20.0,
            },
            solver: SolverSettings::default(),
            n_iter: 5,
            window: WindowConfig { t_start: 10.0, t_end: 100.0, samples_per_decade: 25 },
            parameters: ParameterConfig { lambda: None, alpha: None, b: None, alpha_n: None, tolerance: 0.1 },
            classical: ClassicalConfig { t_max: None, tol: 1e-11, fit_lo: None, fit_hi: None, fit_tol: 1e-6 },
            sweep_lambdas: Vec::new(),
        }
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("run", &["experiment", "output_dir", "seed"]),
    ("sigma", &["kind", "value", "sigma0", "r0", "knots"]),
    ("profile", &["family", "amplitude", "width", "path", "mu", "n", "points", "half_width"]),
    ("solver", &["dt_initial", "dt_control", "mass_tol", "quadrature", "t_truncate", "nodes_per_decade", "n_iter"]),
    ("window", &["t_start", "t_end", "samples_per_decade"]),
    ("parameters", &["lambda", "alpha", "b", "alpha_n", "tolerance"]),
    ("classical", &["t_max", "tol", "fit_lo", "fit_hi", "fit_tol"]),
    ("sweep", &["lambdas"]),
];

struct Entry {
    key: String,
    value: String,
    line: usize,
    column: usize,
}

struct Entries(Vec<Entry>);

impl Entries {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.0.iter().find(|e| e.key == key)
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.raw(key).map(|e| e.value.as_str())
    }

    fn parse<V: std::str::FromStr>(&self, key: &str) -> Result<Option<V>> {
        match self.raw(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<V>().map(Some).map_err(|_| Error::Parse {
                line: e.line,
                column: e.column,
                message: format!("cannot parse `{}` for `{key}`", e.value),
            }),
        }
    }

    fn optional_f64(&self, key: &str) -> Result<Option<Option<f64>>> {
        match self.str(key) {
            Some("none") => Ok(Some(None)),
            _ => Ok(self.parse::<f64>(key)?.map(Some)),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.raw(key) else { return Ok(None) };
        if e.value.trim().is_empty() {
            return Ok(Some(Vec::new()));
        }
        e.value
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: e.line,
                    column: e.column,
                    message: format!("cannot parse list item `{}` for `{key}`", s.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn require_f64(&self, key: &str) -> Result<f64> {
        self.parse::<f64>(key)?.ok_or_else(|| Error::validation(key, "required for this kind"))
    }
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut section: Option<String> = None;
    let mut out: Vec<Entry> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(Error::Parse { line, column: indent + trimmed.len(), message: "expected `]`".into() });
            };
            let name = name.trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(Error::Parse { line, column: indent + 1, message: format!("unknown section `{name}`") });
            }
            section = Some(name.to_string());
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(Error::Parse { line, column: indent, message: "expected `key = value`".into() });
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        let Some(sec) = &section else {
            return Err(Error::Parse { line, column: indent, message: format!("key `{key}` outside any section") });
        };
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(Error::Parse { line, column: indent, message: format!("invalid key `{key}`") });
        }
        let allowed = KEYS.iter().find(|(s, _)| s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(Error::Parse { line, column: indent, message: format!("unknown key `{sec}.{key}`") });
        }
        let full = format!("{sec}.{key}");
        if out.iter().any(|e| e.key == full) {
            return Err(Error::Parse { line, column: indent, message: format!("duplicate key `{full}`") });
        }
        let column = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        out.push(Entry { key: full, value: value.to_string(), line, column });
    }
    Ok(Entries(out))
}

/// Parses and validates a configuration; omitted keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let e = tokenize(text)?;
    let mut cfg = RunConfig::default();

    if let Some(v) = e.raw("run.experiment") {
        cfg.experiment = Experiment::parse(&v.value).ok_or_else(|| Error::Parse {
            line: v.line,
            column: v.column,
            message: format!("unknown experiment `{}`", v.value),
        })?;
    }
    if let Some(p) = e.str("run.output_dir") {
        cfg.output_dir = if p == "none" || p.is_empty() { None } else { Some(PathBuf::from(p)) };
    }
    if let Some(s) = e.parse("run.seed")? {
        cfg.seed = s;
    }

    let kind = e.str("sigma.kind").unwrap_or("zero");
    cfg.sigma = match kind {
        "zero" => SigmaSpec::Zero,
        "constant" => SigmaSpec::Constant { value: e.require_f64("sigma.value")? },
        "inverse_square" | "matched_inverse_square" => {
            let sigma0 = e.require_f64("sigma.sigma0")?;
            let r0 = e.parse("sigma.r0")?.unwrap_or(1.0);
            if kind == "inverse_square" {
                SigmaSpec::InverseSquare { sigma0, r0 }
            } else {
                SigmaSpec::MatchedInverseSquare { sigma0, r0 }
            }
        }
        "tabulated" => {
            let k = e.raw("sigma.knots").ok_or_else(|| Error::validation("sigma.knots", "required for this kind"))?;
            let knots = k
                .value
                .split(',')
                .map(|pair| {
                    let mut it = pair.split(':').map(|s| s.trim().parse::<f64>());
                    match (it.next(), it.next(), it.next()) {
                        (Some(Ok(t)), Some(Ok(s)), None) => Ok((t, s)),
                        _ => Err(Error::Parse {
                            line: k.line,
                            column: k.column,
                            message: format!("knot `{}` is not `t:sigma`", pair.trim()),
                        }),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            SigmaSpec::Tabulated { knots }
        }
        other => return Err(Error::validation("sigma.kind", format!("unknown kind `{other}`"))),
    };
    for key in ["sigma.value", "sigma.sigma0", "sigma.r0", "sigma.knots"] {
        let used = match &cfg.sigma {
            SigmaSpec::Constant { .. } => key == "sigma.value",
            SigmaSpec::InverseSquare { .. } | SigmaSpec::MatchedInverseSquare { .. } => {
                key == "sigma.sigma0" || key == "sigma.r0"
            }
            SigmaSpec::Tabulated { .. } => key == "sigma.knots",
            SigmaSpec::Zero => false,
        };
        if !used && e.raw(key).is_some() {
            return Err(Error::validation(key, format!("not used by sigma kind `{kind}`")));
        }
    }

    let p = &mut cfg.profile;
    match e.str("profile.family").unwrap_or("gaussian") {
        "gaussian" => {
            if e.raw("profile.path").is_some() {
                return Err(Error::validation("profile.path", "only used by the snapshot family"));
            }
            let (mut amplitude, mut width) = (0.05, 1.0);
            if let Some(a) = e.parse("profile.amplitude")? {
                amplitude = a;
            }
            if let Some(w) = e.parse("profile.width")? {
                width = w;
            }
            p.family = Family::Gaussian { amplitude, width };
        }
        "snapshot" => {
            for key in ["profile.amplitude", "profile.width"] {
                if e.raw(key).is_some() {
                    return Err(Error::validation(key, "only used by the gaussian family"));
                }
            }
            let path = e.str("profile.path").ok_or_else(|| Error::validation("profile.path", "required for snapshot"))?;
            p.family = Family::Snapshot { path: PathBuf::from(path) };
        }
        other => return Err(Error::validation("profile.family", format!("unknown family `{other}`"))),
    }
    if let Some(v) = e.parse("profile.mu")? {
        p.mu = v;
    }
    if let Some(v) = e.parse("profile.n")? {
        p.n = v;
    }
    if let Some(v) = e.parse("profile.points")? {
        p.points = v;
    }
    if let Some(v) = e.parse("profile.half_width")? {
        p.half_width = v;
    }

    let s = &mut cfg.solver;
    if let Some(v) = e.parse("solver.dt_initial")? {
        s.dt_initial = v;
    }
    if let Some(v) = e.str("solver.dt_control") {
        s.dt_control = match v {
            "fixed" => DtControl::Fixed,
            "proportional" => DtControl::Proportional,
            other => return Err(Error::validation("solver.dt_control", format!("unknown control `{other}`"))),
        };
    }
    if let Some(v) = e.parse("solver.mass_tol")? {
        s.mass_tol = v;
    }
    if let Some(v) = e.str("solver.quadrature") {
        s.quadrature = match v {
            "trapezoid" => Quadrature::Trapezoid,
            "simpson" => Quadrature::Simpson,
            other => return Err(Error::validation("solver.quadrature", format!("unknown rule `{other}`"))),
        };
    }
    if let Some(v) = e.optional_f64("solver.t_truncate")? {
        s.t_truncate = v;
    }
    if let Some(v) = e.parse("solver.nodes_per_decade")? {
        s.nodes_per_decade = v;
    }
    if let Some(v) = e.parse("solver.n_iter")? {
        cfg.n_iter = v;
    }

    let w = &mut cfg.window;
    if let Some(v) = e.parse("window.t_start")? {
        w.t_start = v;
    }
    if let Some(v) = e.parse("window.t_end")? {
        w.t_end = v;
    }
    if let Some(v) = e.parse("window.samples_per_decade")? {
        w.samples_per_decade = v;
    }

    let q = &mut cfg.parameters;
    for (key, slot) in [
        ("parameters.lambda", &mut q.lambda),
        ("parameters.alpha", &mut q.alpha),
        ("parameters.b", &mut q.b),
        ("parameters.alpha_n", &mut q.alpha_n),
    ] {
        if let Some(v) = e.optional_f64(key)? {
            *slot = v;
        }
    }
    if let Some(v) = e.parse("parameters.tolerance")? {
        q.tolerance = v;
    }

    let c = &mut cfg.classical;
    for (key, slot) in [("classical.t_max", &mut c.t_max), ("classical.fit_lo", &mut c.fit_lo), ("classical.fit_hi", &mut c.fit_hi)] {
        if let Some(v) = e.optional_f64(key)? {
            *slot = v;
        }
    }
    if let Some(v) = e.parse("classical.tol")? {
        c.tol = v;
    }
    if let Some(v) = e.parse("classical.fit_tol")? {
        c.fit_tol = v;
    }

    if let Some(v) = e.list("sweep.lambdas")? {
        cfg.sweep_lambdas = v;
    }

    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    /// Checks every cross-field constraint; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        self.sigma.model()?;
        let p = &self.profile;
        if !(1..=3).contains(&p.n) {
            return Err(Error::validation("profile.n", "must be 1, 2 or 3"));
        }
        if p.points < 8 || !p.points.is_power_of_two() {
            return Err(Error::validation("profile.points", "must be a power of two, at least 8"));
        }
        if !(p.half_width > 0.0 && p.half_width.is_finite()) {
            return Err(Error::validation("profile.half_width", "must be positive"));
        }
        if !p.mu.is_finite() {
            return Err(Error::validation("profile.mu", "must be finite"));
        }
        match &p.family {
            Family::Gaussian { amplitude, width } => {
                if !(*amplitude > 0.0 && amplitude.is_finite()) {
                    return Err(Error::validation("profile.amplitude", "must be positive"));
                }
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::validation("profile.width", "must be positive"));
                }
            }
            Family::Snapshot { path } => {
                if !path.exists() {
                    return Err(Error::validation("profile.path", format!("{} does not exist", path.display())));
                }
            }
        }
        self.solver.validate()?;
        if self.n_iter == 0 {
            return Err(Error::validation("solver.n_iter", "must be at least 1"));
        }
        let w = &self.window;
        if !(w.t_start >= 2.0 && w.t_start.is_finite()) {
            return Err(Error::validation("window.t_start", "must be at least 2"));
        }
        if !(w.t_end > w.t_start && w.t_end.is_finite()) {
            return Err(Error::validation("window.t_end", "must exceed window.t_start"));
        }
        // consecutive sup times at most a factor 1.1 apart
        if w.samples_per_decade < 25 {
            return Err(Error::validation("window.samples_per_decade", "must be at least 25"));
        }
        if let Some(r) = self.solver.t_truncate {
            if !(r >= w.t_end) {
                return Err(Error::validation("solver.t_truncate", "must be at least window.t_end"));
            }
        }
        let q = &self.parameters;
        if let Some(l) = q.lambda {
            if !(0.0..0.5).contains(&l) {
                return Err(Error::validation("parameters.lambda", "must lie in [0, 1/2)"));
            }
        }
        if let Some(a) = q.alpha {
            if !(a > 0.0) {
                return Err(Error::validation("parameters.alpha", "must be positive"));
            }
        }
        if let Some(a) = q.alpha_n {
            if !(a > 2.0) {
                return Err(Error::validation("parameters.alpha_n", "must exceed 2"));
            }
        }
        if !(q.tolerance >= 0.0 && q.tolerance.is_finite()) {
            return Err(Error::validation("parameters.tolerance", "must be non-negative"));
        }
        let c = &self.classical;
        if !(c.tol > 0.0) {
            return Err(Error::validation("classical.tol", "must be positive"));
        }
        if !(c.fit_tol > 0.0) {
            return Err(Error::validation("classical.fit_tol", "must be positive"));
        }
        if let Some(t) = c.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::validation("classical.t_max", "must be positive"));
            }
        }
        if let (Some(lo), Some(hi)) = (c.fit_lo, c.fit_hi) {
            if !(hi > lo) {
                return Err(Error::validation("classical.fit_hi", "must exceed classical.fit_lo"));
            }
        }
        if let Some(&l) = self.sweep_lambdas.iter().find(|l| !(0.0..0.5).contains(*l)) {
            return Err(Error::validation("sweep.lambdas", format!("{l} is outside [0, 1/2)")));
        }
        Ok(())
    }

    /// Truncation time `R` of the run.
    pub fn truncation(&self) -> f64 {
        self.solver.t_truncate.unwrap_or(100.0 * self.window.t_start)
    }

    /// End of the classical integration.
    pub fn t_max(&self) -> f64 {
        self.classical.t_max.unwrap_or_else(|| self.truncation().max(self.window.t_end))
    }

    /// Writes every field explicitly; [`parse_config`] reproduces an equal value.
    pub fn to_text(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map_or("none".into(), |x| x.to_string())
        }
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "experiment = {}", self.experiment.name());
        let _ = writeln!(s, "output_dir = {}", self.output_dir.as_ref().map_or("none".into(), |p| p.display().to_string()));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "\n[sigma]");
        let _ = writeln!(s, "kind = {}", self.sigma.kind());
        match &self.sigma {
            SigmaSpec::Zero => {}
            SigmaSpec::Constant { value } => {
                let _ = writeln!(s, "value = {value}");
            }
            SigmaSpec::InverseSquare { sigma0, r0 } | SigmaSpec::MatchedInverseSquare { sigma0, r0 } => {
                let _ = writeln!(s, "sigma0 = {sigma0}\nr0 = {r0}");
            }
            SigmaSpec::Tabulated { knots } => {
                let k: Vec<String> = knots.iter().map(|(t, v)| format!("{t}:{v}")).collect();
                let _ = writeln!(s, "knots = {}", k.join(", "));
            }
        }
        let p = &self.profile;
        let _ = writeln!(s, "\n[profile]");
        match &p.family {
            Family::Gaussian { amplitude, width } => {
                let _ = writeln!(s, "family = gaussian\namplitude = {amplitude}\nwidth = {width}");
            }
            Family::Snapshot { path } => {
                let _ = writeln!(s, "family = snapshot\npath = {}", path.display());
            }
        }
        let _ = writeln!(s, "mu = {}\nn = {}\npoints = {}\nhalf_width = {}", p.mu, p.n, p.points, p.half_width);
        let v = &self.solver;
        let _ = writeln!(s, "\n[solver]");
        let _ = writeln!(s, "dt_initial = {}", v.dt_initial);
        let _ = writeln!(s, "dt_control = {}", if v.dt_control == DtControl::Fixed { "fixed" } else { "proportional" });
        let _ = writeln!(s, "mass_tol = {}", v.mass_tol);
        let _ = writeln!(s, "quadrature = {}", if v.quadrature == Quadrature::Simpson { "simpson" } else { "trapezoid" });
        let _ = writeln!(s, "t_truncate = {}", opt(v.t_truncate));
        let _ = writeln!(s, "nodes_per_decade = {}\nn_iter = {}", v.nodes_per_decade, self.n_iter);
        let w = &self.window;
        let _ = writeln!(s, "\n[window]");
        let _ = writeln!(s, "t_start = {}\nt_end = {}\nsamples_per_decade = {}", w.t_start, w.t_end, w.samples_per_decade);
        let q = &self.parameters;
        let _ = writeln!(s, "\n[parameters]");
        let _ = writeln!(s, "lambda = {}\nalpha = {}\nb = {}", opt(q.lambda), opt(q.alpha), opt(q.b));
        let _ = writeln!(s, "alpha_n = {}\ntolerance = {}", opt(q.alpha_n), q.tolerance);
        let c = &self.classical;
        let _ = writeln!(s, "\n[classical]");
        let _ = writeln!(s, "t_max = {}\ntol = {}\nfit_lo = {}", opt(c.t_max), c.tol, opt(c.fit_lo));
        let _ = writeln!(s, "fit_hi = {}\nfit_tol = {}", opt(c.fit_hi), c.fit_tol);
        let _ = writeln!(s, "\n[sweep]");
        let l: Vec<String> = self.sweep_lambdas.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "lambdas = {}", l.join(", "));
        s
    }
}
