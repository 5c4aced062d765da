//! Exact scalar fields and univariate polynomials ordered by their eventual
//! behaviour.

mod poly;
mod scalar;

pub use poly::{eventual_sign_threshold, factorial, inv_factorial, poly_compare, Poly};
pub use scalar::{sqrt_rational, square_free_split, FieldKind, Scalar};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields ({0} vs {1})")]
    MixedFields(FieldKind, FieldKind),
    #[error("radicand {0} is not a square-free integer > 1")]
    BadRadicand(u64),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("zero polynomial has no eventual sign")]
    ZeroPolynomial,
    #[error("root bound does not fit in 64 bits")]
    BoundTooLarge,
}
