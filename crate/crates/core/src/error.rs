use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("point has no coordinates")]
    EmptyPoint,

    #[error("non-finite coordinate {value} at position {position}")]
    NonFinite { position: usize, value: f64 },

    #[error("weight must be positive (or +inf), got {0}")]
    InvalidWeight(f64),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("inconsistent sample: points {first} and {second} coincide but carry labels {first_label} and {second_label}")]
    InconsistentSample {
        first: usize,
        second: usize,
        first_label: u32,
        second_label: u32,
    },

    #[error("points coincide; no decision boundary exists")]
    CoincidentPoints,

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("decision boundary requires 2-d points")]
    NotPlanar,

    #[error("condensed set is empty")]
    EmptyCondensedSet,

    #[error("sample index {index} out of range for dataset of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("sample index {0} appears twice in condensed set")]
    DuplicateIndex(usize),

    #[error("{indices} indices but {weights} weights")]
    WeightCountMismatch { indices: usize, weights: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight of sample {index} is {weight}, expected nearest-enemy distance {expected}")]
    NotEnemyWeighted {
        index: usize,
        weight: f64,
        expected: f64,
    },

    #[error("prototype {0} has no opposite-labeled witness")]
    MissingWitness(usize),

    #[error("solver output failed consistency verification ({violations} misclassified sample points)")]
    VerificationFailed { violations: usize },

    #[error("csv row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn csv(row: usize, message: impl Into<String>) -> Self {
        Error::Csv {
            row,
            message: message.into(),
        }
    }
}
