use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid pearl: {0}")]
    InvalidPearl(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Every adjacent eigenvalue difference is within the degeneracy tolerance.
    #[error("spectrum is fully degenerate at tolerance {tau}")]
    FullyDegenerate { tau: f64 },

    #[error("no admissible sector pairs for branches ({n}, {m})")]
    EmptyReport { n: usize, m: usize },

    #[error("branch {0} overlaps a neighbouring branch; branch labels are not well defined")]
    BranchOverlap(usize),

    #[error("time-averaged distribution did not settle below eps up to T = {t_hi} (tv = {tv})")]
    MixingNotFound { t_hi: f64, tv: f64 },
}
