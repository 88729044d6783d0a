use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid permutation word {0:?}: must be a bijection on 1..=len with len >= 2")]
    InvalidPermutation(Vec<u8>),
    #[error("dimension {n} is out of range (supported: 1..={max})")]
    DimensionOutOfRange { n: usize, max: usize },
    #[error("generator index {index} out of range 1..={n}")]
    GeneratorOutOfRange { index: usize, n: usize },
    #[error("rank {rank} out of range for n = {n} (must be < {count})")]
    RankOutOfRange { rank: u64, n: usize, count: u64 },
    #[error("size mismatch: expected n = {expected}, found n = {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("invalid face chain: {0}")]
    InvalidFace(String),
    #[error("vertex {0} is not contained in the face")]
    NotInFace(String),
    #[error("value level {level} is not an available split level")]
    UnavailableLevel { level: usize },
    #[error("duplicate vertex {0} in projection input")]
    DuplicateVertex(String),
    #[error("empty input set")]
    EmptySet,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "full enumeration of n = {n} needs about {bytes} bytes and exceeds the cap n <= {cap}; \
         raise the cap with PERMUPERC_MAX_N (hard limit {hard_cap})"
    )]
    EnumerationTooLarge { n: usize, cap: usize, hard_cap: usize, bytes: u64 },
    #[error("computation exceeds its cost guard: {0}")]
    CostGuard(String),
    #[error("lambda target {lambda} infeasible for n = {n} (must lie in [0, (n+1)!])")]
    InfeasibleLambda { lambda: f64, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
