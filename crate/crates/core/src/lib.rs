//! Critical-line values of the Riemann zeta function, generalized Gram points,
//! and numerical verification of discrete moments taken over those points.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`]: log-Gamma, the Riemann–Siegel theta function, the
//!   functional-equation factor `Δ(s)`, Hardy's `Z(t)` and `ζ(s)` by
//!   Euler–Maclaurin summation.
//! * [`grampoints`]: roots of `Δ(1/2+it) = e^{2iφ}` and their sign classes.
//! * [`divisor`]: generalized divisor functions, truncated Dirichlet
//!   convolutions and the moment polynomials `P₂`, `P₃`.
//! * [`moments`]: discrete moment sums with their predicted main terms.
//! * [`resonator`]: the resonance construction for large values.
//! * [`io`], [`verify`]: file formats, caches and the verification driver
//!   behind the `zeta-gram` command-line tool.

pub mod divisor;
pub mod error;
pub mod grampoints;
pub mod io;
pub mod moments;
pub mod resonator;
pub mod special;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version string written into cache headers and report metadata.
pub const EVALUATOR_VERSION: &str = concat!("zeta-gram/", env!("CARGO_PKG_VERSION"));
