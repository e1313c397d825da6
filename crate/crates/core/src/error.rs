use thiserror::Error;

/// Errors raised by state construction, group checks and the mixed-state pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GgmError {
    #[error("invalid system shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: expected dims {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("basis is not orthonormal (max Gram deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("weights must be nonnegative and sum to 1 (sum = {0})")]
    InvalidWeights(f64),

    #[error("amplitude support leaks outside the declared sector (index {0})")]
    SectorLeak(usize),

    #[error("unitary group check failed: {0}")]
    InvalidGroup(String),

    #[error("twirl preimage check failed (max deviation {0:e})")]
    PreimageFailed(f64),

    #[error("mixed state is not invariant under the group (max deviation {0:e})")]
    NotInvariant(f64),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("point {0:?} lies outside the mixing simplex")]
    OutsideSimplex(Vec<f64>),

    #[error("decomposition size {m} is smaller than the rank {rank}")]
    DecompositionTooSmall { m: usize, rank: usize },

    #[error("invalid input: {0}")]
    InvalidSpec(String),

    #[error("linear program did not converge after {0} pivots")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, GgmError>;
