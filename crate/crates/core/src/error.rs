use thiserror::Error;

use crate::qforms::QuadForm;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("form {0} is not positive definite")]
    NotPositiveDefinite(QuadForm),

    #[error("{0} is not a negative discriminant (must be < 0 and congruent to 0 or 1 mod 4)")]
    BadDiscriminant(i64),

    #[error("discriminant mismatch: {left} vs {right}")]
    DiscriminantMismatch { left: i64, right: i64 },

    #[error("form {0} is not primitive")]
    NotPrimitive(QuadForm),

    #[error("class {0} does not belong to the class group")]
    ClassNotInGroup(QuadForm),

    #[error("fundamental discriminants differ: {left} vs {right}")]
    FieldMismatch { left: i64, right: i64 },

    #[error("conductor {target} does not divide {conductor}")]
    BadConductor { conductor: i64, target: i64 },

    #[error("lattice generators are linearly dependent")]
    DegenerateLattice,

    #[error("Gram matrix is not symmetric")]
    NotSymmetric,

    #[error("Gram matrix has an odd diagonal entry")]
    NotEven,

    #[error("integer overflow: {0}")]
    Overflow(&'static str),

    #[error("CM point (a={a}, b={b}, D={disc}) is invalid: 4a must divide b^2 - D with a > 0 and D < 0")]
    InvalidCmPoint { a: i64, b: i64, disc: i64 },

    #[error("q-series needs {needed} terms but the cap is {cap}")]
    PrecisionUnsupported { needed: usize, cap: usize },

    #[error("value is not within tolerance of an integer")]
    NotNearInteger,

    #[error("value is not within tolerance of an element of the CM field")]
    NotNearFieldElement,

    #[error("coefficients did not stabilise (last attempt at {digits} digits)")]
    PrecisionExhausted { digits: u32 },

    #[error("every resolvent in the fallback ladder produced colliding roots")]
    ResolventDegenerate,

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
