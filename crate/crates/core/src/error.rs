use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("overlap index ({i}, {j}) out of range for d = {d} (need 1 <= i < j <= d)")]
    IndexOutOfRange { i: usize, j: usize, d: usize },
    #[error("overlap pair ({i}, {j}) specified twice")]
    DuplicatePair { i: usize, j: usize },
    #[error("overlap ({i}, {j}) has modulus {modulus} >= 1")]
    OverlapTooLarge { i: usize, j: usize, modulus: f64 },
    #[error("matrix is not a valid Gram matrix: {0}")]
    NotGram(String),
    #[error("Gram matrix is not positive definite (min eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("eigensolver did not converge")]
    EigenNoConvergence,
    #[error("zero vector")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("states belong to different inner-product settings")]
    SettingMismatch,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("weights must be nonnegative and sum to 1 (sum = {0})")]
    InvalidWeights(f64),
    #[error("state is not normalized (psi^dag G psi = {0})")]
    NotNormalized(f64),
    #[error("initial state has a vanishing coefficient at index {0}")]
    RankDeficient(usize),
    #[error("dimension {0} exceeds the permutation enumeration limit of 8")]
    TooLarge(usize),
    #[error("residual is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("residual does not annihilate the initial state (norm {0:e})")]
    NotAnnihilating(f64),
    #[error("Kraus set failed the trace-preservation certificate (residual {0:e})")]
    NotCertified(f64),
    #[error("parameter {name} = {value} outside admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("branch is not the minimal eigenvalue for s = {0}")]
    WrongBranch(f64),
    #[error("frame is not admissible: {0}")]
    InvalidFrame(String),
    #[error("no golden state found (best tilde deviation {0:e})")]
    NoGoldenState(f64),
    #[error("mismatch against tabulated result: {0}")]
    Mismatch(String),
    #[error("simplex optimizer did not converge (best value {value}, gradient norm {gradient_norm:e})")]
    NoConvergence { value: f64, gradient_norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
