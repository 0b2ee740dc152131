//! Error taxonomy shared by the library and the CLI.

use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition (bad graph data,
    /// inconsistent cover, non-positive weight, malformed configuration).
    #[error("validation: {0}")]
    Validation(String),

    /// An exact computation was asked to enumerate more objects than its
    /// documented cap allows.
    #[error("{what}: size {got} exceeds the cap of {limit}")]
    CapExceeded {
        what: &'static str,
        got: u128,
        limit: u128,
    },

    /// The requested fugacity lies outside the regime the grid estimator
    /// is guaranteed to converge in.
    #[error("fugacity regime violated: {0}")]
    Regime(String),

    /// Every sample of an empty-intersection event came back negative, so
    /// the telescoping ratio would be zero and the estimate undefined.
    #[error(
        "ratio estimate for clique {clique} was zero after {samples} samples; \
         increase the sampling budget or epsilon"
    )]
    ZeroFrequency { clique: usize, samples: u64 },

    /// Exact mixing-time iteration hit its hard cap before reaching the
    /// target total-variation distance.
    #[error("chain did not reach the target distance within {cap} steps")]
    MixingCapReached { cap: u64 },

    /// A transition matrix failed the reversibility (detailed balance)
    /// check that a spectral computation requires.
    #[error(
        "matrix is not reversible with respect to the given distribution: \
         worst |pi(x)P(x,y) - pi(y)P(y,x)| = {worst:.3e} exceeds {tol:.1e}"
    )]
    NotReversible { worst: f64, tol: f64 },

    /// A floating-point computation overflowed to infinity or NaN.
    #[error("numeric overflow in {0}")]
    Overflow(&'static str),

    /// Reading or writing a file failed.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// Parsing a JSON document failed.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to:
    /// 2 for exceeded caps, 3 for fugacity-regime violations,
    /// 1 for everything else (validation and runtime failures).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 2,
            Error::Regime(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
