use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} min is outside the profile range [0, {end}]")]
    OutOfRange { t: f64, end: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("exponential saturation: argument {argument} exceeds cap {cap}")]
    Saturation { argument: f64, cap: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("correlation undefined: {0}")]
    UndefinedStatistic(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("degenerate closed form: beta = 1 + gamma ({beta}); use the ODE path")]
    DegenerateClosedForm { beta: f64 },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unknown group `{0}` (expected general, shoulder, elbow, hand or back-hip)")]
    UnknownGroup(String),

    #[error("parse error at row {row}: {reason}")]
    Parse { row: usize, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
