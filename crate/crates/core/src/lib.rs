//! Exact solver toolkit for two-stage robust optimization with binary
//! uncertainty.
//!
//! Everything runs on arbitrary-precision rationals: an LP/MILP kernel with
//! dual certificates, penalty-based Lagrangian evaluation of the second
//! stage, sufficient-condition checks and closed-form multiplier bounds,
//! column-and-constraint generation and Benders loops with ex-post
//! multiplier verification and restarts, and a brute-force enumeration
//! oracle that ground-truths all of it at desk scale.

pub mod engine;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod lp;
pub mod milp;
pub mod model;
pub mod multiplier;
pub mod oracle;
pub mod scalar;
mod simplex;
pub mod tu;

pub use error::{Error, Result};
pub use scalar::{ExtValue, Scalar};
