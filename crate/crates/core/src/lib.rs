//! Locally private estimation of multinomials and densities.
//!
//! The crate is organised in five layers:
//!
//! - [`domain`]: privacy budgets, simplex geometry, the trigonometric basis,
//!   density models with L² distances, and seeded random streams.
//! - [`channels`]: ε-locally private privatization mechanisms and the exact
//!   likelihood-ratio auditor.
//! - [`estimators`]: reconstruction of simplex vectors and densities from
//!   privatized records, plus the non-private baselines.
//! - [`bounds`]: hypercube packings, bump-function density families and the
//!   Le Cam / Fano / information-bound calculators.
//! - [`harness`]: the strategy registry, Monte Carlo sweeps, log-log slope
//!   fits and report emission used by the `lpme` binary.

pub mod bounds;
pub mod channels;
pub mod domain;
pub mod error;
pub mod estimators;
pub mod harness;

pub use error::{Error, Result};
