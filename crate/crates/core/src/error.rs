use thiserror::Error;

/// Failure modes surfaced by validation, fitting, evaluation, and document
/// handling.
#[derive(Debug, Error)]
pub enum Error {
    /// Two sample nodes compare exactly equal (both real components).
    #[error("sample nodes {first} and {second} are identical; nodes must be pairwise distinct")]
    DuplicateNodes { first: usize, second: usize },

    /// Shapes or lengths of related inputs disagree.
    #[error("dimension mismatch: {message}")]
    DimensionMismatch { message: String },

    /// The node count cannot support the requested degrees: a fit needs at
    /// least `max_ij(n_ij) + d + 2` samples.
    #[error("{available} samples available, but the requested degrees need at least {required}")]
    TooFewSamples { available: usize, required: usize },

    /// A weight vector is negative somewhere or does not sum to one.
    #[error("invalid weights: {message}")]
    InvalidWeights { message: String },

    /// Solver or diagnostic options outside their documented ranges.
    #[error("invalid options: {message}")]
    InvalidOptions { message: String },

    /// An input scalar is NaN or infinite.
    #[error("non-finite value in {location}")]
    NonFiniteData { location: String },

    /// The basis recurrence cannot advance: a subdiagonal coupling fell below
    /// the breakdown tolerance, so the weighted node powers are numerically
    /// rank deficient.
    #[error(
        "basis recurrence broke down at column {column}: \
         subdiagonal {magnitude:.3e} is at or below tolerance {tolerance:.3e}"
    )]
    Breakdown {
        column: usize,
        magnitude: f64,
        tolerance: f64,
    },

    /// Weight filtering left too few active nodes for the requested degrees.
    #[error("only {active} nodes remain active after weight filtering, but {required} are needed")]
    InfeasibleAfterFiltering { active: usize, required: usize },

    /// A multiplicative weight update summed to zero: every node that still
    /// carried weight has zero error.
    #[error("weight update lost all mass: every weighted node has zero error")]
    AllMassVanished,

    /// The dense reference path refuses inputs whose explicit power basis is
    /// too ill-conditioned to trust.
    #[error("dense reference path refused: condition estimate {condition:.3e} exceeds 1e12")]
    IllConditioned { condition: f64 },

    /// A serialized document failed to parse or violates its schema.
    #[error(
        "malformed document{}: {message}",
        .location.as_deref().map(|l| format!(" ({l})")).unwrap_or_default()
    )]
    MalformedDocument {
        message: String,
        location: Option<String>,
    },
}

impl Error {
    pub(crate) fn dims(message: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            message: message.into(),
        }
    }

    pub(crate) fn malformed(message: impl Into<String>) -> Self {
        Error::MalformedDocument {
            message: message.into(),
            location: None,
        }
    }
}
