use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid pair ({0}, {0}): a point cannot neighbor itself")]
    InvalidPair(u32),

    #[error("index {index} out of range for {len} points")]
    InvalidIndex { index: u32, len: usize },

    #[error("pair store would need {needed} bytes, cap is {cap}")]
    MemoryCap { needed: u64, cap: u64 },

    #[error("no parameter table entry for n={n}, d={d}")]
    NoTableEntry { n: usize, d: usize },

    #[error("tuning failed: best mean recall {best_recall:.4} (m={best_m}, c_tilde={best_c_tilde}) below target")]
    TuningFailed { best_recall: f64, best_m: usize, best_c_tilde: f64 },

    #[error("degenerate world: obstacles leave no free space")]
    DegenerateWorld,

    #[error("sampling stalled after {0} consecutive rejections")]
    SamplingStalled(usize),

    #[error("unknown scenario: {0}")]
    UnknownScenario(String),

    #[error("malformed data: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
