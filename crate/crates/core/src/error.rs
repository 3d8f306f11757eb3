use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid vertex {index} for a graph on {n} vertices")]
    InvalidVertex { index: usize, n: usize },
    #[error("operation needs a nonempty vertex set")]
    EmptySet,
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("instance too large for the exhaustive oracle: {0}")]
    OracleSize(String),
    #[error("invalid call: {0}")]
    InvalidCall(String),
    #[error("invalid phase: {0}")]
    InvalidPhase(String),
    #[error("need at least 2 initially active vertices, got {0}")]
    InvalidSeedCount(usize),
    #[error("invalid count: {0}")]
    InvalidCount(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("no alpha in (0,1) satisfies (1-alpha)*alpha > c*t1 = {0}")]
    NoValidAlpha(f64),
    #[error("experiment has no replicates")]
    EmptyExperiment,
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },
}

impl Error {
    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
