use thiserror::Error;

/// Errors raised by the reparametrization pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0} samples (need an even count >= 4)")]
    InvalidGrid(usize),
    #[error("invalid mode count {0}: must be even and positive")]
    InvalidModes(usize),
    #[error("cannot evaluate {modes} modes on {n_out} points without aliasing")]
    DownsampleForbidden { modes: usize, n_out: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("nufft plan: {0}")]
    Plan(String),
    #[error("degenerate curve: min local spacing {min_spacing:e} at node {node}")]
    DegenerateCurve { min_spacing: f64, node: usize },
    #[error("positivity violated: min value {min:e}")]
    Positivity { min: f64 },
    #[error("invalid monitor: {0}")]
    InvalidSpec(String),
    #[error("k_max = {k_max} exceeds N_up/2 = {half}: exponentials are undersampled")]
    Undersampled { k_max: usize, half: usize },
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("monotonicity lost at t = {t}: {detail}")]
    MonotonicityLoss { t: f64, detail: String },
    #[error("N3 = {n3} is smaller than N2 = {n2}")]
    UnderResolution { n3: usize, n2: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable category used by the command-line driver.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Parse(_) => "parse",
            Error::Parameter(_) | Error::InvalidSpec(_) | Error::InvalidGrid(_) | Error::InvalidModes(_) => "parameter",
            _ => "numerical",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
