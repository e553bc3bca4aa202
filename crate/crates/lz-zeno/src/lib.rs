//! Maximizing Landau-Zener transitions with optimally timed nonselective
//! measurements.
//!
//! A two-level system swept through an avoided crossing ends up transferring
//! between its adiabatic levels with probability e^{-2 pi gamma}. Projective
//! population measurements interleaved with the sweep raise that probability
//! (toward 1 in the Zeno limit of infinitely many); this crate computes the
//! exact transition probability for any measurement schedule and finds the
//! optimal instants for a fixed measurement budget:
//!
//! - [`lz_core`]: adaptive propagation of the rescaled two-level system,
//!   including infinite-time boundaries, plus the special functions used by
//!   the small-gamma expansion.
//! - [`objective`]: measurement schedules, the exact probability objective,
//!   and the variable-observable upper bound.
//! - [`dp_exact`]: dynamic programming over a dense time grid (the reference
//!   optimizer for any gamma).
//! - [`antiadiabatic`]: the gamma-independent first-order pipeline for small
//!   coupling, with the published solution table embedded for comparison.
//! - [`adiabatic`]: the large-gamma pipeline (analytic seeds, differential
//!   evolution within clamped boxes) and the maximin analysis.
//! - [`methods`]: dispatch used by the command-line driver.
//!
//! All numeric kernels parallelize with rayon when the default `parallel`
//! feature is enabled and fall back to identical sequential loops without it.

pub mod adiabatic;
pub mod antiadiabatic;
pub mod dp_exact;
mod error;
pub mod lz_core;
pub mod methods;
pub mod objective;
mod par;

pub use error::{LzError, Result};
