use std::fmt;
use std::str::FromStr;

use crate::model::Race;

use super::{AdminCounts, AdministrativeDataset, EstimateError, ExternalRaceDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    NaiveRiskDifference,
    NaiveRiskRatio,
    BiasFactor,
    /// Naive risk ratio times bias factor.
    CrrIdentified,
}

impl Estimator {
    pub fn needs_external(self) -> bool {
        matches!(self, Estimator::BiasFactor | Estimator::CrrIdentified)
    }

    pub fn name(self) -> &'static str {
        match self {
            Estimator::NaiveRiskDifference => "naive_rd",
            Estimator::NaiveRiskRatio => "naive_rr",
            Estimator::BiasFactor => "bias_factor",
            Estimator::CrrIdentified => "crr",
        }
    }

    /// Evaluates the estimator on cell counts and, when needed, the
    /// external encounter share.
    pub(crate) fn on_counts(self, counts: &AdminCounts, p1: Option<f64>) -> Result<f64, EstimateError> {
        let external = || p1.ok_or(EstimateError::InvalidParameter("external share required".into()));
        match self {
            Estimator::NaiveRiskDifference => {
                let (r1, r0) = group_rates(counts)?;
                Ok(r1 - r0)
            }
            Estimator::NaiveRiskRatio => risk_ratio(counts),
            Estimator::BiasFactor => counts_bias_factor(counts, external()?),
            Estimator::CrrIdentified => Ok(risk_ratio(counts)? * counts_bias_factor(counts, external()?)?),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive_rd" => Ok(Estimator::NaiveRiskDifference),
            "naive_rr" => Ok(Estimator::NaiveRiskRatio),
            "bias_factor" => Ok(Estimator::BiasFactor),
            "crr" => Ok(Estimator::CrrIdentified),
            other => Err(format!("unknown estimator `{other}`")),
        }
    }
}

fn group_rates(counts: &AdminCounts) -> Result<(f64, f64), EstimateError> {
    let r1 = counts.force_rate(Race::Minority).ok_or(EstimateError::MissingGroup(Race::Minority))?;
    let r0 = counts.force_rate(Race::Majority).ok_or(EstimateError::MissingGroup(Race::Majority))?;
    Ok((r1, r0))
}

fn risk_ratio(counts: &AdminCounts) -> Result<f64, EstimateError> {
    let (r1, r0) = group_rates(counts)?;
    if r0 <= 0.0 {
        return Err(EstimateError::ZeroDenominator);
    }
    Ok(r1 / r0)
}

fn counts_bias_factor(counts: &AdminCounts, p1: f64) -> Result<f64, EstimateError> {
    if counts.minority <= 0.0 || counts.majority <= 0.0 {
        return Err(EstimateError::DegenerateOdds("detainee"));
    }
    encounter_odds(p1).map(|o| (counts.minority / counts.majority) / o)
}

fn encounter_odds(p1: f64) -> Result<f64, EstimateError> {
    if p1 > 0.0 && p1 < 1.0 {
        Ok(odds(p1))
    } else {
        Err(EstimateError::DegenerateOdds("encounter"))
    }
}

fn odds(p: f64) -> f64 {
    p / (1.0 - p)
}

/// `[P(D=1|M=1) / P(D=0|M=1)] / [P(D=1) / P(D=0)]`.
///
/// Both shares must lie strictly inside `(0, 1)`.
pub fn bias_factor_from_shares(detained_share: f64, encounter_share: f64) -> Result<f64, EstimateError> {
    if !(detained_share > 0.0 && detained_share < 1.0) {
        return Err(EstimateError::DegenerateOdds("detainee"));
    }
    Ok(odds(detained_share) / encounter_odds(encounter_share)?)
}

fn counts_in(data: &AdministrativeDataset, x: &str) -> Result<AdminCounts, EstimateError> {
    data.counts_in(x).ok_or_else(|| EstimateError::UnknownStratum(x.to_owned()))
}

/// `mean(y | d=1, x) - mean(y | d=0, x)` among detained civilians.
pub fn naive_risk_difference(data: &AdministrativeDataset, x: &str) -> Result<f64, EstimateError> {
    Estimator::NaiveRiskDifference.on_counts(&counts_in(data, x)?, None)
}

/// `mean(y | d=1, x) / mean(y | d=0, x)` among detained civilians.
pub fn naive_risk_ratio(data: &AdministrativeDataset, x: &str) -> Result<f64, EstimateError> {
    Estimator::NaiveRiskRatio.on_counts(&counts_in(data, x)?, None)
}

pub fn bias_factor(
    data: &AdministrativeDataset,
    external: &ExternalRaceDistribution,
    x: &str,
) -> Result<f64, EstimateError> {
    Estimator::BiasFactor.on_counts(&counts_in(data, x)?, Some(external.p1(x)?))
}

/// Selection-adjusted causal risk ratio.
pub fn crr_identified(
    data: &AdministrativeDataset,
    external: &ExternalRaceDistribution,
    x: &str,
) -> Result<f64, EstimateError> {
    Estimator::CrrIdentified.on_counts(&counts_in(data, x)?, Some(external.p1(x)?))
}

/// Any estimator on stratum `x`, optionally with the +0.5 cell correction.
pub fn point_estimate(
    estimator: Estimator,
    data: &AdministrativeDataset,
    external: Option<&ExternalRaceDistribution>,
    x: &str,
    haldane: bool,
) -> Result<f64, EstimateError> {
    let mut counts = counts_in(data, x)?;
    if haldane {
        counts = counts.with_haldane();
    }
    let p1 = if estimator.needs_external() {
        let ext = external.ok_or_else(|| EstimateError::MissingExternal(x.to_owned()))?;
        Some(ext.p1(x)?)
    } else {
        None
    };
    estimator.on_counts(&counts, p1)
}
