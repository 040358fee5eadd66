//! Numerical verification of Jensen-type inequalities for affine combinations
//! and positive linear functionals, aimed at functions that are 3-convex at a
//! point.
//!
//! The crate validates hypotheses, evaluates both sides of each inequality,
//! computes refinement chains through the constant `A`, classifies functions
//! at a point, and searches seeded random scenarios for counterexamples.

pub mod affine;
pub mod analysis;
pub mod domain;
pub mod error;
pub mod funclib;
pub mod functional;
pub mod report;
pub mod scenario;
pub mod scengen;

pub use domain::{AffineConfig, HullReading, Interval, Named, ValidityReport, WeightedGroup};
pub use error::{Error, Result};
pub use funclib::{catalog, FunctionModel, Side};
pub use report::{Branch, Chain, ChainReport, Mode, TheoremId, Verdict};

/// Absolute tolerance for equality constraints on normalised quantities.
pub const EPS_EQ: f64 = 1e-9;

/// Grid subintervals per side used when classifying a function at a point.
pub const DEFAULT_GRID: usize = 1000;

/// Grid subintervals used for whole-interval convexity and 3-convexity checks.
pub const CHECK_GRID: usize = 400;
