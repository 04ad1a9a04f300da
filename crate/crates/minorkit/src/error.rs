use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed table for operation `{op}`: {detail}")]
    MalformedTable { op: String, detail: String },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("size overflow: {0}")]
    SizeOverflow(String),
    #[error("enumeration limit of {limit} exceeded")]
    LimitExceeded { limit: usize },
    #[error("not a distributive lattice: {0}")]
    NotDistributiveLattice(String),
    #[error("arity too small: {0}")]
    ArityTooSmall(String),
    #[error("essential arity {ess} exceeds cap {cap}")]
    EssTooLarge { ess: usize, cap: usize },
    #[error("split class has no non-constant image points")]
    EmptySplit,
    #[error("partition size {n} exceeds cap {cap}")]
    PartitionTooLarge { n: usize, cap: usize },
    #[error("poset size {size} exceeds cap {cap}")]
    PosetTooLarge { size: usize, cap: usize },
    #[error("disjoint union of an empty family")]
    EmptyUnion,
    #[error("invalid alter ego: {0}")]
    InvalidAlterEgo(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("duality failure: {0}")]
    DualityFailure(String),
    #[error("prime pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
