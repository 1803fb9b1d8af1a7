use thiserror::Error;

/// Errors shared across the workbench modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} exceeds the enumeration limit of 12")]
    DimensionTooLarge(usize),
    #[error("generator matrix is not invertible (|det| = {0:.3e})")]
    NonInvertibleGenerator(f64),
    #[error("Hadamard order {0} exceeds the supported maximum of 4096")]
    OrderTooLarge(usize),
    #[error("rotation file: {0}")]
    ParseError(String),
    #[error("matrix is not orthogonal (max |R^T R - I| entry = {0:.3e})")]
    NotOrthogonal(f64),
    #[error("unknown builtin lattice `{0}`")]
    UnknownName(String),
    #[error("builtin `{name}` does not support dimension {dim}")]
    UnsupportedDimension { name: String, dim: usize },
    #[error("Rician factor K must be nonnegative, got {0}")]
    NegativeK(f64),
    #[error("argument must be nonnegative, got {0}")]
    NegativeInput(f64),
    #[error("noise variance must be positive, got {0}")]
    NonpositiveVariance(f64),
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("lattice volume must be positive, got {0}")]
    NonpositiveVolume(f64),
    #[error("constellation of {0} points exceeds the limit of 2^20")]
    TooManyPoints(u128),
    #[error("points per dimension must be at least 2, got {0}")]
    InvalidQ(u32),
    #[error("zero vector is not a valid input")]
    ZeroVector,
    #[error("quadrature supports order 2 only, got order {0}")]
    UnsupportedOrder(usize),
    #[error("bound {0} is invalid: {1}")]
    InvalidBound(f64, &'static str),
    #[error("at least one trial is required")]
    NoTrials,
    #[error(
        "local diversity violated by t = {witness:?}: diversity {diversity} * |t|^2 {norm_sq} < {threshold}"
    )]
    ViolationFound {
        witness: Vec<f64>,
        diversity: usize,
        norm_sq: f64,
        threshold: f64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
