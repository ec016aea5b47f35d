use thiserror::Error;

/// Errors raised by the decomposition engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid probability {0:?}")]
    InvalidProbability(String),

    #[error("outcome {outcome} has non-positive total mass {mass}")]
    NonPositiveMass { outcome: String, mass: String },

    #[error("total probability mass is {0}, expected 1")]
    MassNotNormalised(String),

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("unknown variable {0:?}")]
    UnknownVariable(String),

    #[error("label {label:?} is not in the alphabet of {variable}")]
    UnknownLabel { variable: String, label: String },

    #[error("empty variable selection")]
    EmptySelection,

    #[error("event {0} has zero probability")]
    ZeroProbability(String),

    #[error("distribution has no target variable")]
    NoTarget,

    #[error("target is not composite: {0}")]
    NotComposite(String),

    #[error("operation requires {expected} predictors, distribution has {found}")]
    PredictorCount { expected: String, found: usize },

    #[error("predictor count {n} exceeds the lattice cap of {cap}")]
    LatticeCap { n: usize, cap: usize },

    #[error("invalid lattice node: {0}")]
    InvalidNode(String),

    #[error("nodes range over different predictor counts ({0} vs {1})")]
    MismatchedNodes(usize, usize),

    #[error("node {0} is not part of this lattice")]
    ForeignNode(String),

    #[error("missing value for {0}")]
    MissingValue(String),

    #[error("invalid source event: {0}")]
    InvalidSourceEvent(String),

    #[error("invalid log base {0}")]
    InvalidBase(f64),

    #[error("unknown corpus entry {0:?}")]
    UnknownCorpus(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid market: {0}")]
    InvalidMarket(String),

    #[error("identity violated: {0}")]
    IdentityViolated(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
