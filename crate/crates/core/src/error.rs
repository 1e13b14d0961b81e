use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario file is syntactically valid but violates an invariant.
    #[error("invalid scenario: {0}")]
    Scenario(String),

    /// A vehicle id was referenced that does not exist in the scenario.
    #[error("unknown vehicle id {0}")]
    UnknownVehicle(u64),

    /// The constraint-system text dump could not be parsed.
    #[error("constraint dump parse error at line {line}: {msg}")]
    DumpParse { line: usize, msg: String },

    /// A formula cannot be encoded (e.g. negation over a collision predicate).
    #[error("encoding error: {0}")]
    Encode(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn scenario(msg: impl Into<String>) -> Self {
        Error::Scenario(msg.into())
    }
}
