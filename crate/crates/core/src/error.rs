use thiserror::Error;

/// Errors produced by model validation and the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix {which} is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { which: &'static str, asymmetry: f64 },

    #[error("matrix {which} is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite {
        which: &'static str,
        min_eigenvalue: f64,
    },

    #[error(
        "joint covariance is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})"
    )]
    InconsistentBlock { min_eigenvalue: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("probability table does not sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("negative probability mass {value:e} at flat index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("canonical matrix singular value {value} exceeds 1")]
    SingularValueOutOfRange { value: f64 },

    #[error("canonical correlation {value} is numerically 1; mutual information diverges")]
    PerfectCorrelation { value: f64 },

    #[error("component count k = {k} outside 1..={n}")]
    BadK { k: usize, n: usize },

    #[error("correlation {0} outside [0, 1)")]
    RhoOutOfRange(f64),

    #[error("correlations must be sorted in descending order")]
    UnsortedRho,

    #[error("gamma grid must be ascending and nonnegative")]
    UnsortedGrid,

    #[error("gamma = {0} must be finite and nonnegative")]
    InvalidGamma(f64),

    #[error("a0 = {0} outside [0, 0.5]")]
    A0OutOfRange(f64),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("no feasible coupling with I(X;Y|W) <= {target} found up to lambda = {lambda_max} (best achieved {best_achieved})")]
    Infeasible {
        target: f64,
        lambda_max: f64,
        best_achieved: f64,
    },

    #[error("joint alphabet has {states} states, limit is {max_states}")]
    TooLarge { states: usize, max_states: usize },

    #[error("{got} samples, need at least {needed}")]
    TooFewSamples { got: usize, needed: usize },

    #[error("symbol index {index} out of range for alphabet of size {card} (column {column})")]
    IndexOutOfRange {
        column: usize,
        index: usize,
        card: usize,
    },

    #[error("conditional-expectation and marginal projections need a real embedding of W with {card_w} values")]
    MissingEmbedding { card_w: usize },

    #[error("invalid option: {0}")]
    InvalidOption(String),
}

pub type Result<T> = std::result::Result<T, Error>;
