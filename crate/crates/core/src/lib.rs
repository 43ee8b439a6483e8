//! Carnot groups, their homogeneous quotients and intrinsic Taylor polynomials.

pub mod field;
pub mod group;
pub mod harness;
pub mod linalg;
pub mod optimize;
pub mod quotient;
pub mod lie;
pub mod scalar;
pub mod symcalc;
pub mod taylor;

pub use lie::{AlgebraElement, AlgebraError, RawAlgebra, StratifiedAlgebra};
pub use scalar::{Rational, RealScalar, Scalar, Tolerance};
pub use symcalc::{Expr, Jet, Monomial, Poly, VarSpace};

/// Exact polynomial.
pub type RatPoly = Poly<Rational>;
/// Exact algebra element.
pub type RatElement = AlgebraElement<Rational>;
