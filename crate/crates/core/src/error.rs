use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value {value} at coordinate {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("threat model requires N >= 3m + 1, got N = {total} with m = {selfish}")]
    ThreatModelViolation { total: usize, selfish: usize },

    #[error("both client groups must be non-empty (n = {n}, m = {m})")]
    EmptyGroup { n: usize, m: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("trimming {trim} from each end leaves nothing of {count} values")]
    EmptyAfterTrim { count: usize, trim: usize },

    #[error("rule needs at least {required} models, got {got}")]
    TooFewModels { required: usize, got: usize },

    #[error("reference model has zero norm")]
    ZeroReference,

    #[error("invalid bounds: lower {lower} > upper {upper}")]
    InvalidBounds { lower: f64, upper: f64 },

    #[error("input sequence is not sorted in descending order")]
    NotSorted,

    #[error("index out of range: {n} values cannot support {m} selfish clients")]
    IndexOutOfRange { n: usize, m: usize },

    #[error("need more than {m} values, got {n}")]
    TooFewValues { n: usize, m: usize },

    #[error("target {value} lies outside [{lower}, {upper}]")]
    OutOfBounds { value: f64, lower: f64, upper: f64 },

    #[error("no valid split index found for target {value}")]
    SearchFailure { value: f64 },

    #[error("trimmed-mean crafting assumes trim count c = m = {m}, got c = {c}")]
    TrimCountMismatch { c: usize, m: usize },

    #[error("degenerate denominator {0} in flame crafting")]
    DegenerateDenominator(f64),

    #[error("round {got} does not follow round {previous}")]
    NonMonotonicRound { previous: u64, got: u64 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("test set is empty")]
    EmptyTestSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}
