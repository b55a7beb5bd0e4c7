//! Principal-stratum estimands and selection-adjusted causal risk ratios for
//! outcomes that are recorded only after a post-treatment selection step,
//! such as use of force recorded only for civilians who were stopped.
//!
//! - [`model`]: closed-form estimands of the population model.
//! - [`simulator`]: seeded encounter simulation and brute-force oracle.
//! - [`estimator`]: naive and adjusted risk ratios, bootstrap, sensitivity.
//! - [`io`]: CSV loaders for administrative, census and survey inputs.
//! - [`report`], [`cli`], [`verify`]: reporting and the command-line driver.

pub mod cli;
pub mod estimator;
pub mod io;
pub mod model;
pub mod report;
pub mod rng;
pub mod simulator;
pub mod verify;
