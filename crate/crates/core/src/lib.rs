//! Longest increasing paths through a planar Poisson process when every step
//! must have a slope inside a fixed band `[alpha, beta]`.
//!
//! * [`geometry`]: the band order, the area-preserving map that turns it into
//!   coordinatewise dominance, the three-regime limiting shape and the
//!   largest-rectangle solvers behind it.
//! * [`sampler`]: seeded Poisson clouds and boundary source/sink processes.
//! * [`chains`]: the `O(n log n)` chain engine, a quadratic oracle, optimal
//!   supports and the source/sink machinery (Hammersley lines, `Z`, crossing).
//! * [`experiments`]: Monte Carlo runs probing large-t behaviour.

pub mod chains;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
