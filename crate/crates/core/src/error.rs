use thiserror::Error;

use crate::metric::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not square: {rows} rows but row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("{labels} labels supplied for a {size}x{size} matrix")]
    LabelCount { labels: usize, size: usize },

    #[error("non-finite distance {value} at ({i}, {j})")]
    NonFinite { i: usize, j: usize, value: f64 },

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("label sets differ")]
    LabelMismatch,

    #[error("not a valid (pseudo-)metric: {0}")]
    Invalid(ValidationReport),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("index {index} out of range for a space of {size} points")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("point set must be non-empty")]
    EmptySet,

    #[error("scale factor must be positive and finite, got {0}")]
    NonPositiveScale(f64),

    #[error("invalid radius {0}")]
    InvalidRadius(f64),

    #[error("invalid spider parameters: {0}")]
    InvalidParams(String),

    #[error("parameter sequences have different lengths ({0} vs {1})")]
    ParamLengthMismatch(usize, usize),

    #[error("fingerprint recovery failed at {stage}: {reason}")]
    Fingerprint { stage: String, reason: String },

    #[error("correspondence leaves point {index} of the {side} space uncovered")]
    Coverage { side: &'static str, index: usize },

    #[error("space of {size} points exceeds the exact solver cap of {cap}; use the lower/upper bounds")]
    TooLarge { size: usize, cap: usize },

    #[error("product of {size} points exceeds the cap of {cap}")]
    ProductTooLarge { size: usize, cap: usize },

    #[error("invalid family configuration: {0}")]
    Config(String),

    #[error("every branch collides with an anchor; collision table (rows = anchors): {table:?}")]
    NoCleanBranch { table: Vec<Vec<bool>> },

    #[error("map is undefined at point {0} of the domain ball")]
    MapUndefined(usize),

    #[error("map sends point {from} to {to}, outside a target of {size} points")]
    MapOutOfRange { from: usize, to: usize, size: usize },

    #[error("need R > eps > 0, got R = {radius}, eps = {eps}")]
    RadiusSlack { radius: f64, eps: f64 },

    #[error("rough isometry is not certified")]
    Uncertified,

    #[error("metric repair moved the restricted entry ({i}, {j}) by {delta}")]
    RestrictionBroken { i: usize, j: usize, delta: f64 },

    #[error("unknown suite {0:?}; expected one of {1}")]
    UnknownSuite(String, String),
}

