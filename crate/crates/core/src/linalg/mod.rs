//! Exact linear algebra over Q and GF(p).

mod matrix;
mod scalar;

pub use matrix::{Matrix, Rref};
pub use scalar::{Field, Scalar};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("matrix of shape {0:?} is not square")]
    NotSquare((usize, usize)),
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("cannot parse scalar literal {0:?}")]
    BadLiteral(String),
    #[error("{0} has no image in GF({1})")]
    NotRepresentable(String, u32),
}
