use thiserror::Error;

/// Errors raised by the arithmetic layers and the module-level pipelines.
///
/// Verdict-style operations (validation, strong divisibility, Breuil checks)
/// do not use this type for a negative answer; they return reports instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid precision profile: {0}")]
    InvalidProfile(String),
    #[error("inversion of an element indistinguishable from zero")]
    InversionOfZero,
    #[error("result has no significant p-adic digits")]
    PrecisionExhausted,
    #[error("Hensel lifting failed: {0}")]
    HenselFailure(String),
    #[error("series is not a unit: {0}")]
    NotAUnit(String),
    #[error("series vanishes within the truncation")]
    ZeroWithinTruncation,
    #[error("inconclusive at precision: {0}")]
    Inconclusive(String),
    #[error("series is not primitive: {0}")]
    NotPrimitive(String),
    #[error("rank undetermined at truncation: {0}")]
    RankUndetermined(String),
    #[error("Frobenius determinant vanishes within the truncation")]
    ZeroDeterminant,
    #[error("membership inconclusive at truncation: {0}")]
    MembershipInconclusive(String),
    #[error("automatic subobject enumeration unsupported: {0}")]
    AutoModeUnsupported(String),
    #[error("invalid subobject: {0}")]
    InvalidSubobject(String),
    #[error("Fil^1 generator not normalized: {0}")]
    NotNormalized(String),
    #[error("theta is undefined on negative t-degree components")]
    NegativeTDegree,
    #[error("t-degree {0} outside the model window")]
    TWindowExceeded(i32),
    #[error("determinant is not a unit: {0}")]
    DeterminantNotUnit(String),
    #[error("identity failed: {0}")]
    IdentityFailure(String),
    #[error("Weierstrass degree inconclusive: {0}")]
    InconclusiveWeierstrass(String),
    #[error("unsupported module shape: {0}")]
    UnsupportedShape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that more precision (p-adic or truncation) might cure.
    pub fn is_precision_limited(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted
                | Error::ZeroWithinTruncation
                | Error::Inconclusive(_)
                | Error::RankUndetermined(_)
                | Error::MembershipInconclusive(_)
                | Error::InconclusiveWeierstrass(_)
        )
    }
}
