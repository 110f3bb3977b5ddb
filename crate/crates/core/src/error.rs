use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // classical flow
    #[error("oscillator coefficient is not finite at t = {t}")]
    NonFiniteSigma { t: f64 },
    #[error("ODE step-size controller failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("t = {t} is outside the sampled domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },
    #[error("zeta_2 is trapped or vanishing on the fit window near t = {t}")]
    TrappedTrajectory { t: f64 },
    #[error("asymptotic fit residual {residual:e} exceeds tolerance {tol:e} ({what})")]
    BadFit { what: &'static str, residual: f64, tol: f64 },
    #[error("{what} = {value} is out of range ({range})")]
    OutOfRange { what: &'static str, value: f64, range: &'static str },

    // spectral transforms
    #[error("modulation/dilation parameter tau must be nonzero")]
    ZeroTau,
    #[error("MDFM factor is singular at t = {t} ({which})")]
    SingularFactor { t: f64, which: &'static str },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    // profile
    #[error("profile time must be positive, got t = {t}")]
    NonpositiveTime { t: f64 },

    // evolution
    #[error("mass drift {drift:e} exceeds tolerance {tol:e} at t = {t}")]
    MassDrift { t: f64, drift: f64, tol: f64 },
    #[error("non-finite field value encountered at t = {t}")]
    NonFinite { t: f64 },
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("Picard iteration failed to contract: residuals {residuals:?}")]
    NoContraction { residuals: Vec<f64> },
    #[error("invalid time interval: {0}")]
    InvalidInterval(String),

    // parameter windows
    #[error("lambda = {lambda} is outside [0, {threshold}) for n = {n}")]
    LambdaOutOfRange { n: usize, lambda: f64, threshold: f64 },
    #[error("dimension n = {0} is not in {{1, 2, 3}}")]
    BadDimension(usize),

    // diagnostics
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("error sample {index} is not positive ({value})")]
    NonPositiveError { index: usize, value: f64 },
    #[error("time samples span a factor {span:.3}, need at least 10")]
    InsufficientSpan { span: f64 },
    #[error("(q, r) = ({q}, {r}) is not admissible in dimension {n}")]
    InadmissiblePair { q: f64, r: f64, n: usize },

    // harness
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("snapshot format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { key: key.into(), message: message.into() }
    }

    /// True for errors produced by configuration or usage problems.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Validation { .. })
    }
}
