//! Exact decision procedures for valued constraint satisfaction problems whose
//! cost functions are piecewise linear and homogeneous over the rationals.
//!
//! The pipeline reduces an instance over `Q` to a finite sample of the
//! structure, then decides it with the basic LP relaxation. Brute-force and
//! LP-per-piece oracles are provided for cross-checking.

pub mod blp;
pub mod cli;
pub mod document;
pub mod error;
pub mod formula;
pub mod fpol;
pub mod lp;
pub mod oracle;
pub mod plh;
pub mod qnum;
pub mod sampling;
pub mod table;

pub use error::{Error, Result};
