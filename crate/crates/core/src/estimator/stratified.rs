use super::{bootstrap, AdministrativeDataset, BootstrapConfig, EstimateError, EstimateWithCI, Estimator, ExternalRaceDistribution};

/// Naive and selection-adjusted risk ratios for one stratum. Failures are
/// kept per stratum rather than aborting the table.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumEstimate {
    pub stratum: String,
    pub naive: Result<EstimateWithCI, EstimateError>,
    /// `None` when no external distribution was supplied.
    pub adjusted: Option<Result<EstimateWithCI, EstimateError>>,
}

/// Every stratum is bootstrapped with the same master seed, so a
/// one-stratum table reproduces the unstratified result.
pub fn stratified_estimates(
    data: &AdministrativeDataset,
    external: Option<&ExternalRaceDistribution>,
    strata: &[String],
    config: &BootstrapConfig,
) -> Result<Vec<StratumEstimate>, EstimateError> {
    if let Some(missing) = strata.iter().find(|x| !data.contains_stratum(x)) {
        return Err(EstimateError::UnknownStratum(missing.clone()));
    }
    Ok(strata
        .iter()
        .map(|x| StratumEstimate {
            stratum: x.clone(),
            naive: bootstrap(Estimator::NaiveRiskRatio, data, None, x, config),
            adjusted: external.map(|ext| bootstrap(Estimator::CrrIdentified, data, Some(ext), x, config)),
        })
        .collect())
}
