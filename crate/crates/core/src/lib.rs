//! Exact symbolic engine for the variational tricomplex of local gauge systems.
//!
//! The core is generic over the coefficient field (see [`Coeff`]); the
//! aliases below fix the exact rational instance used by every check.

pub mod coeff;
pub mod foliation;
pub mod forms;
pub mod grading;
pub mod kernel;
pub mod linsolve;
pub mod sample;
pub mod symplectic;
pub mod variational;

pub use coeff::Coeff;
pub use forms::{EvoField, Frame, VertField};
pub use kernel::{FieldSpec, Gen, Grade, Grading, JetVar, Monomial, MultiIndex, Parity, Poly, Role, Spectrum};

/// Arbitrary precision rationals, the default exact coefficients.
pub type Rational = num_rational::BigRational;

/// Jet polynomial with exact coefficients.
pub type GradedScalar = Poly<Rational>;
/// Bigraded local form with exact coefficients.
pub type LocalForm = Poly<Rational>;

/// Floating point instance, useful for quick numerical spot checks only.
pub type LocalFormF64 = Poly<f64>;

/// Builds an exact rational `n/d`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
