use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors are split into input validation problems and numerical failures so
/// that callers (the CLI in particular) can map them onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {message}")]
    Scenario { path: String, message: String },

    #[error("frequency {omega} rad/s outside the model window [{lo}, {hi}]")]
    OutOfWindow { omega: f64, lo: f64, hi: f64 },

    #[error("singular response: {0}")]
    Singular(String),

    #[error("no Cherenkov pole: {0}")]
    NoPole(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("perturbation theory not valid: {0}")]
    PerturbationInvalid(String),

    #[error("not a transparency center: {0}")]
    NotTransparencyCenter(String),

    #[error("integration window crosses an emission threshold: {0}")]
    ThresholdCrossing(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for problems with the inputs rather than with the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Scenario { .. } | Error::OutOfWindow { .. } | Error::Io { .. }
        )
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Scenario { .. } => "invalid-scenario",
            Error::OutOfWindow { .. } => "out-of-window",
            Error::Singular(_) => "singular",
            Error::NoPole(_) => "no-pole",
            Error::Degenerate(_) => "degenerate",
            Error::PerturbationInvalid(_) => "perturbation-invalid",
            Error::NotTransparencyCenter(_) => "not-transparency-center",
            Error::ThresholdCrossing(_) => "threshold-crossing",
            Error::Quadrature(_) => "quadrature",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn scenario(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario { path: path.into(), message: message.into() }
    }
}
