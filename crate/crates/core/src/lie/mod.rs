//! Stratified Lie algebras and the BCH product.

pub mod algebra;
pub mod bch;

pub use algebra::{AlgebraElement, AlgebraError, RawAlgebra, StratifiedAlgebra, DEFAULT_STEP_CAP};
pub use bch::DynkinTable;
