use thiserror::Error;

use crate::model::ModelCheck;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration of {requested} items exceeds the configured cap of {cap}")]
    CapExceeded { requested: u128, cap: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),

    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("incompatible family: sections {first} and {second} disagree at measurement `{measurement}`")]
    Incompatible {
        first: usize,
        second: usize,
        measurement: String,
    },

    #[error("invalid distribution over {context}: {reason}")]
    InvalidDistribution { context: String, reason: String },

    #[error("model fails compatibility:\n{0}")]
    Signaling(ModelCheck),

    #[error("mixture weights sum to {0}, expected 1")]
    WeightSum(String),

    #[error("models do not share a scenario")]
    ScenarioMismatch,

    #[error("representation is not combinatorial")]
    NotCombinatorial,

    #[error("model tier {actual} does not support a {requested} witness")]
    TierMismatch { requested: String, actual: String },

    #[error("event {0} is not a member of the event set")]
    NotInSigma(String),

    #[error("union {0} is not an event, so its measure is undefined")]
    UnionNotEvaluable(String),

    #[error("padding rejected: {condition}: {detail}")]
    PaddingRejected { condition: String, detail: String },

    #[error("not an extension: {0}")]
    NotAnExtension(String),

    #[error("not an event image: {0}")]
    NotEventImage(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("quantum experiment invalid: {0}")]
    Quantum(String),

    #[error("cannot snap {value} to a rational with denominator <= {bound} within {tolerance:e}")]
    Snap {
        value: f64,
        bound: u64,
        tolerance: f64,
    },

    #[error("schema violation at {location}: {message}")]
    Schema { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            location: location.into(),
            message: message.into(),
        }
    }

    /// True for errors the CLI reports as validation failures rather than
    /// resource limits.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
