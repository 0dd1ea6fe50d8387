use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("characteristic mismatch: {left} vs {right}")]
    CharacteristicMismatch { left: u8, right: u8 },
    #[error("unsupported field: p = {0} (need a prime below 256)")]
    UnsupportedField(u8),
    #[error("matrix dimension {0} is outside 1..=64")]
    UnsupportedDimension(usize),
    #[error("matrix is singular (rank {rank} < {dimension})")]
    SingularMatrix { rank: usize, dimension: usize },
    #[error("matrix literal: {0}")]
    MatrixLiteral(String),
    #[error("no nonzero invariant quadratic form")]
    NoInvariantForm,
    #[error("invariant forms are not unique: solution space of dimension {}", .basis.len())]
    AmbiguousForm { basis: Vec<Vec<u8>> },
    #[error("not a bijection: image {image} repeated")]
    NotABijection { image: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("degree {0} exceeds the supported maximum of 65536")]
    DegreeTooLarge(usize),
    #[error("point {point} is outside 1..={degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("element order exceeds cap {cap}")]
    OrderExceedsCap { cap: u64 },
    #[error("generating set needs at least one element")]
    EmptyGenerators,
    #[error("incompatible generators")]
    IncompatibleGenerators,
    #[error("generator index {index} out of range ({count} generators)")]
    GeneratorIndex { index: usize, count: usize },
    #[error("word syntax error at column {column}: {message}")]
    WordSyntax { column: usize, message: String },
    #[error("unknown generator name `{0}`")]
    UnknownGenerator(String),
    #[error("order mismatch: expected {expected}, reached {actual}")]
    OrderMismatch { expected: u128, actual: u128 },
    #[error("chain verification failed: {0}")]
    VerificationFailed(String),
    #[error("chain is not verified")]
    Unverified,
    #[error("no faithful base point available for the action")]
    NoBasePoint,
    #[error("budget of {budget} exhausted ({what})")]
    BudgetExceeded { budget: u64, what: &'static str },
    #[error("orbit exceeds the point budget of {0}")]
    MemoryBudgetExceeded(u64),
    #[error("point set is not closed under the action")]
    PointSetNotClosed,
    #[error("orbit size {orbit} does not divide group order {group}")]
    OrbitSizeMismatch { orbit: u128, group: u128 },
    #[error("subgroup has more than {cap} elements")]
    CapExceeded { cap: usize },
    #[error("fingerprint matches several catalog entries: {0:?}")]
    AmbiguousMatch(Vec<String>),
    #[error("fingerprint snapshot: {0}")]
    Snapshot(String),
}
