//! Exact rational scalars and matrices, quadratic-form inertia, linear
//! solving and polyhedral cone queries.

mod cone;
mod forms;
mod linear;
mod matrix;
mod simplex;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use cone::{cone_contains, cone_max_param, ConeQueryResult, ParamMax};
pub use forms::{determinant, is_negative_definite, signature_of, Signature};
pub use linear::{solve_linear, LinearSolution};
pub use matrix::RMatrix;

/// Arbitrary precision fraction, always normalized with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rows of unequal length")]
    RaggedRows,
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("vector is not in the cone")]
    NotInCone,
}

pub type Result<T, E = ExactError> = std::result::Result<T, E>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den` in lowest terms. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn dot(x: &[Rational], y: &[Rational]) -> Rational {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Integer value of `x`, or `None` if it has a denominator or overflows `i64`.
pub fn to_i64(x: &Rational) -> Option<i64> {
    use num_traits::ToPrimitive;
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}
