//! Sudler trigonometric products `P_N(α) = ∏_{n=1}^{N} |2 sin(π n α)|`.
//!
//! The crate evaluates plain and shifted products directly and through their
//! Ostrowski factorization, computes the cotangent sums and limit functions
//! that govern them, and checks the asymptotic maximization and norm
//! formulas against exhaustive scans.

// `!(x < b)` guards are deliberate: they reject NaN along with out-of-range input.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alpha;
pub mod cf;
pub mod cli;
pub mod cotangent;
pub mod error;
pub mod fixtures;
pub mod hexfloat;
pub mod limitfn;
pub mod ostrowski;
pub mod phase;
pub mod quad;
pub mod real;
pub mod special;
pub mod sudler;
pub mod sum;
pub mod surd;
pub mod theorems;
pub mod trig;
pub mod verify;

pub use alpha::{parse_alpha, AlphaSpec, DigitRule};
pub use cf::ConvergentTable;
pub use error::{Error, ParseError, Result};
pub use real::{PrecisionConfig, Real};

/// Version tag written into every JSON and CSV artifact.
pub const SCHEMA_VERSION: u32 = 1;
