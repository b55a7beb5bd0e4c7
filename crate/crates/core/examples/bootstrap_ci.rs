//! Percentile bootstrap intervals for the naive and adjusted risk ratios.
//! Census shares are held fixed; only administrative rows are resampled.

use postselect::estimator::{bootstrap, BootstrapConfig, Estimator, ExternalRaceDistribution, POOLED_STRATUM};
use postselect::model::PopulationModel;
use postselect::simulator::{sample_encounters, to_administrative};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = PopulationModel::new(0.5, [0.2, 0.1, 0.0, 0.7], 0.1, 0.2)?;
    let admin = to_administrative(&sample_encounters(&model, 10_000, 3)?);
    let census = ExternalRaceDistribution::fixed(POOLED_STRATUM, model.p_d())?;
    let config = BootstrapConfig { replicates: 2000, ..BootstrapConfig::default() };

    for estimator in [Estimator::NaiveRiskRatio, Estimator::BiasFactor, Estimator::CrrIdentified] {
        let e = bootstrap(estimator, &admin, Some(&census), POOLED_STRATUM, &config)?;
        println!(
            "{:<12} {:.3}  {:.0}% CI [{:.3}, {:.3}]  ({} replicates, seed {}, {} undefined)",
            estimator.name(),
            e.point,
            100.0 * e.level,
            e.lo,
            e.hi,
            e.replicates,
            e.seed,
            e.undefined_replicates
        );
    }
    Ok(())
}
