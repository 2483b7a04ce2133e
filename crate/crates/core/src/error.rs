use thiserror::Error;

/// Errors raised by the measure algebra, process evaluation, samplers and
/// the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid process: {0}")]
    InvalidProcess(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An exponent left the representable range (natural-log scale > 700).
    #[error("numeric overflow: exponent {exponent:.3} exceeds {limit}")]
    Overflow { exponent: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "covariance matrix is not positive semidefinite \
         (smallest eigenvalue {min_eigenvalue:.3e}, trace {trace:.3e})"
    )]
    NotPsd { min_eigenvalue: f64, trace: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {error:.3e})")]
    Quadrature { a: f64, b: f64, error: f64 },

    #[error("sampling window cap exceeded: truncation bound {bound:.3e} > {epsilon:.3e} at padding {padding}")]
    WindowCap { bound: f64, epsilon: f64, padding: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("pair is labelled {0}; canonical forms exist only for S2 and S3")]
    WrongLabel(String),

    #[error("empty sample stream")]
    EmptySamples,

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Largest exponent accepted by [`checked_exp`].
pub const EXP_LIMIT: f64 = 700.0;

/// `exp(x)` that refuses to silently overflow.
pub fn checked_exp(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::InvalidArgument("exponent is NaN".into()));
    }
    if x > EXP_LIMIT {
        return Err(Error::Overflow { exponent: x, limit: EXP_LIMIT });
    }
    Ok(x.exp())
}
