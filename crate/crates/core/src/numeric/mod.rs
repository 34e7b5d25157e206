//! Scalar, jet and dense linear-algebra primitives.

pub mod jet;
pub mod linalg;
pub mod scalar;

pub use jet::{jet_derivatives, jet_div, jet_exp, jet_pow_int, jet_sinh, Jet};
pub use linalg::{kron, lu_determinant, solve, CMatrix, CVector};
pub use scalar::{c64, real, Scalar, POLE_TOL};
