//! Poissonized longest-increasing-subsequence laboratory.
//!
//! The crate simulates Poisson point configurations in the plane, computes
//! longest up/right chains (last-passage values) together with the set of
//! points that lie on some maximal chain, evaluates the Tracy–Widom GUE
//! distribution from the Hastings–McLeod solution of Painlevé II, and runs
//! Monte Carlo campaigns that estimate the longitudinal (χ = 1/3) and
//! transversal (ξ = 2/3) fluctuation exponents.
//!
//! Modules:
//! - [`point_process`]: points, rectangles, seeded Poisson sampling, cylinders.
//! - [`chains`]: patience-sorting chain lengths, forward/backward ranks,
//!   maximal points, transversal summaries and the cylinder event.
//! - [`tracy_widom`]: Airy function, Painlevé II boundary-value solver, `F(t)`.
//! - [`scaling_lab`]: campaigns, exponent estimators, geometric inequality
//!   checks and persistence.

pub mod chains;
pub mod error;
pub mod point_process;
pub mod scaling_lab;
pub mod tracy_widom;

pub use error::{LabError, Result};
