use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported field degree {0} (supported: 1..=64)")]
    UnsupportedDegree(u32),

    #[error("no solution in GF(2^{degree}): trace obstruction, pass to GF(2^{})", 2 * .degree)]
    NoSolutionInField { degree: u32 },

    #[error("operands live in different fields (GF(2^{left}) vs GF(2^{right}))")]
    FieldMismatch { left: u32, right: u32 },

    #[error("variable mismatch: expected {expected}, found {found}")]
    VariableMismatch { expected: char, found: char },

    #[error("brute-force search space of {size} candidates exceeds the limit of {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },

    #[error("the zero class defines a split extension")]
    ZeroClass,

    #[error("term with exponent {exponent} is outside the polynomial domain in the inverse variable")]
    PositiveExponentPresent { exponent: i64 },

    #[error("not a D4 situation: {0}")]
    NotD4(String),

    #[error("descent failed: {0}")]
    DescentFailed(String),

    #[error("eta reduces to 1: the conjugate of the branch point v = 2*eta is itself a branch point")]
    EtaIsOne,

    #[error("not a certified unit at the stored precision: {0}")]
    NotAUnit(String),

    #[error("identity failed, residual = {residual}")]
    IdentityFailed { residual: String },

    #[error("F has even degree {0}; genus bookkeeping needs an odd degree")]
    EvenDegreeF(i64),

    #[error("precision {0} out of range (supported: 1..=64 bits)")]
    InvalidPrecision(u32),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("certificate error: {0}")]
    Certificate(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnsupportedDegree(_) => "UnsupportedDegree",
            Error::NoSolutionInField { .. } => "NoSolutionInField",
            Error::FieldMismatch { .. } => "FieldMismatch",
            Error::VariableMismatch { .. } => "VariableMismatch",
            Error::SearchSpaceTooLarge { .. } => "SearchSpaceTooLarge",
            Error::ZeroClass => "ZeroClass",
            Error::PositiveExponentPresent { .. } => "PositiveExponentPresent",
            Error::NotD4(_) => "NotD4",
            Error::DescentFailed(_) => "DescentFailed",
            Error::EtaIsOne => "EtaIsOne",
            Error::NotAUnit(_) => "NotAUnit",
            Error::IdentityFailed { .. } => "IdentityFailed",
            Error::EvenDegreeF(_) => "EvenDegreeF",
            Error::InvalidPrecision(_) => "InvalidPrecision",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse { .. } => "ParseError",
            Error::Certificate(_) => "CertificateError",
        }
    }

    /// Input/usage errors, as opposed to domain failures.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::InvalidPrecision(_)
                | Error::UnsupportedDegree(_)
                | Error::InvalidInput(_)
                | Error::VariableMismatch { .. }
        )
    }
}
