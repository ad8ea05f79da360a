use thiserror::Error;

/// Errors raised by the library.
///
/// Hypothesis failures in the majorization builders are *not* errors; they
/// are reported as data inside the build outcome.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cannot parse number `{0}`")]
    ParseNumber(String),

    #[error("malformed measure spec: {0}")]
    MeasureSpec(String),

    #[error("measure is the point mass at 0")]
    PointMassAtZero,

    #[error("weights do not sum to 1 (total {0})")]
    NotNormalized(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("vector is not non-increasing and non-negative at position {0}")]
    Unordered(usize),

    #[error("vector totals differ: {0} vs {1}")]
    TotalsDiffer(String, String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("psi grid violates hypothesis: {0}")]
    PsiHypothesis(String),

    #[error("enumeration guard exceeded: {configs} configurations > {limit}")]
    EnumerationGuard { configs: u128, limit: u128 },

    #[error("non-finite value during enumeration (couplings too large?)")]
    Overflow,

    #[error("interaction error: {0}")]
    Interaction(String),

    #[error("malformed monomial `{0}`")]
    Monomial(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
