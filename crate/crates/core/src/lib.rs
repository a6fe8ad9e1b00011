//! Exact construction and verification of left-invariant pseudo-Kähler
//! structures on nilpotent Lie algebras.

pub mod catalog;
pub mod geometry;
pub mod liealg;
pub mod linalg;
pub mod scalar;
pub mod solver;
pub mod tensors;

pub use scalar::{parse_expr, ParamBinding, Scalar, ScalarError};
