//! Exact polynomial arithmetic, truncated jets and test-function expressions.

pub mod expr;
pub mod jet;
pub mod poly;

pub use expr::{parse_poly, Expr, ExprError};
pub use jet::{Jet, JetError};
pub use poly::{CompiledPoly, Monomial, Poly, PolyDisplay, VarSpace};
