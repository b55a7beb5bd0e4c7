//! Estimation from administrative records.
//!
//! The causal risk ratio in a covariate cell factors into the naive risk
//! ratio among detained civilians and a bias factor: the odds of a detainee
//! being a minority divided by the odds of an encounter being with a
//! minority. The first two pieces come from the administrative data; the
//! encounter odds come from an [`ExternalRaceDistribution`]. Conditional
//! proportions are plain stratified frequencies.

mod bootstrap;
mod data;
mod point;
mod sensitivity;
mod stratified;

use thiserror::Error;

use crate::model::Race;

pub use bootstrap::{bootstrap, percentile, BootstrapConfig, EstimateWithCI, DEFAULT_LEVEL, DEFAULT_REPLICATES, DEFAULT_SEED};
pub use data::{
    AdminCounts, AdminRecord, AdministrativeDataset, ExternalKind, ExternalRaceDistribution, Mixture, Respondent,
    POOLED_STRATUM,
};
pub use point::{
    bias_factor, bias_factor_from_shares, crr_identified, naive_risk_difference, naive_risk_ratio, point_estimate,
    Estimator,
};
pub use sensitivity::sensitivity_mixture;
pub use stratified::{stratified_estimates, StratumEstimate};

pub(crate) use data::weighted_share;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("no {0:?} records in the stratum")]
    MissingGroup(Race),
    #[error("zero denominator: no force among majority-race detainees")]
    ZeroDenominator,
    #[error("degenerate odds: {0} share is 0 or 1")]
    DegenerateOdds(&'static str),
    #[error("unknown stratum `{0}`")]
    UnknownStratum(String),
    #[error("no external race share for stratum `{0}`")]
    MissingExternal(String),
    #[error("external race share for stratum `{0}` is undefined")]
    UndefinedExternal(String),
    #[error("{undefined} of {replicates} bootstrap replicates undefined")]
    TooManyUndefined { undefined: usize, replicates: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
