//! Crate-wide error type.
//!
//! Variants split into three families that front ends map to distinct exit
//! codes: parse errors, violated mathematical preconditions (singular model,
//! torsion point, power relation, ...), and internal certification failures
//! that should never occur on valid inputs.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("division by a zero rational function")]
    DivisionByZero,
    #[error("order of the zero function is undefined")]
    ZeroFunctionOrder,
    #[error("cannot refine against the zero polynomial")]
    ZeroPolynomial,
    #[error("place {0} is not refined against this function")]
    UnrefinedPlace(String),
    #[error("divisor generations differ ({0} vs {1})")]
    GenerationMismatch(u64, u64),
    #[error("operation requires effective divisors")]
    NotEffective,
    #[error("empty divisor sequence")]
    EmptySequence,

    #[error("constant {0} has a factor above the trial division bound {1}")]
    ConstantTooLarge(String, u64),
    #[error("singular Weierstrass model: the discriminant vanishes")]
    SingularCurve,
    #[error("point does not satisfy the curve equation")]
    PointNotOnCurve,
    #[error("base point is the identity")]
    IdentityBasePoint,
    #[error("base point is torsion of order {0}")]
    TorsionBasePoint(u64),
    #[error("coordinate is a root of unity")]
    RootOfUnityCoordinate,
    #[error("relation {n}P = Q holds within the horizon")]
    PowerRelation { n: u64 },
    #[error("no good specialization value among the candidates")]
    NoGoodSpecialization,
    #[error("nontorsion certificate inconclusive after {0} specializations")]
    CertificateInconclusive(u32),
    #[error("{0}")]
    Invalid(String),

    #[error("internal certification failure: {0}")]
    Certification(String),
}

impl Error {
    /// Stable coarse classification used by front ends for exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } => ErrorKind::Parse,
            Error::Certification(_) => ErrorKind::Certification,
            _ => ErrorKind::Hypothesis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Hypothesis,
    Certification,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Parse => "parse",
            ErrorKind::Hypothesis => "hypothesis",
            ErrorKind::Certification => "certification",
        }
    }
}
