use thiserror::Error;

/// Errors raised by the library.
///
/// Several variants are sentinels for internal inconsistencies
/// (`InvalidSlicing`, `DualityViolation`, `PairingFailure`): they are never
/// expected on valid input and indicate a convention bug when they fire.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {0} vs {1} variables")]
    ArityMismatch(usize, usize),

    #[error("bracket of the trivial monomial vanishes identically")]
    ZeroWeight,

    #[error("monomial {0} has an odd doubled exponent; its square root is off the half lattice")]
    HalfLattice(String),

    #[error("q-values required to evaluate {0}")]
    MissingQValues(String),

    #[error("slices of {0} fail the interlacing condition")]
    InvalidSlicing(String),

    #[error("color vector {alpha:?} exceeds the degree bound {bound}")]
    OutOfBound { alpha: Vec<i64>, bound: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("virtual tangent violates Calabi-Yau duality: {0}")]
    DualityViolation(String),

    #[error("weight pairing failed: {0}")]
    PairingFailure(String),

    #[error("bracket [{0}] vanishes at the chosen point")]
    BracketVanishes(String),

    #[error("neutral weight with trivial kappa power in limit classification")]
    NeutralZero,

    #[error("exp requires a series with zero constant term")]
    ExpDomain,

    #[error("log requires a series with constant term 1")]
    LogDomain,

    #[error("chart weights do not multiply to kappa")]
    CalabiYauViolation,

    #[error("term has t-content {0} that is not a power of kappa^(1/2)")]
    NonKappaContent(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
