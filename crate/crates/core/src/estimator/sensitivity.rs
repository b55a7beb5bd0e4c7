use super::{EstimateError, ExternalRaceDistribution, Mixture};

/// Treats encounters in each stratum as a mixture of local residents (weight
/// `lambda`) and city-wide residents with minority share `citywide_p1`.
///
/// The mixture is stored on the distribution and applied whenever a share
/// is read, so survey distributions stay resampleable.
pub fn sensitivity_mixture(
    external: &ExternalRaceDistribution,
    citywide_p1: f64,
    lambda: f64,
) -> Result<ExternalRaceDistribution, EstimateError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(EstimateError::InvalidParameter(format!("lambda {lambda} not in [0, 1]")));
    }
    if !(citywide_p1 > 0.0 && citywide_p1 < 1.0) {
        return Err(EstimateError::InvalidParameter(format!("citywide share {citywide_p1} not in (0, 1)")));
    }
    let mut mixed = external.clone();
    if lambda < 1.0 {
        mixed.push_mixture(Mixture { lambda, citywide_p1 });
    }
    Ok(mixed)
}
