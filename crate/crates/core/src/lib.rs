//! Exact-solution machinery for the antiperiodic XXZ chain.
//!
//! * [`numeric`]: complex scalars, Taylor jets, dense linear algebra.
//! * [`model`]: chain parameters, root sets and the scalar building blocks.
//! * [`oracle`]: full Hilbert-space operators and states for small `N`.
//! * [`bae`]: Bethe equations and the multi-start Newton solver.
//! * [`detforms`]: determinant formulas for inhomogeneous chains.
//! * [`homolimit`]: the homogeneous point via jets or `ε`-extrapolation.
//! * [`verify`], [`tables`], [`report`]: drivers and output records.

pub mod bae;
pub mod detforms;
pub mod error;
pub mod homolimit;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
