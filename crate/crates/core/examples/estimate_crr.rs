//! The naive risk ratio among detained civilians understates the causal
//! risk ratio; multiplying by the bias factor recovers it. Here the
//! external race distribution is the simulated encounter population itself.

use postselect::estimator::{bias_factor, crr_identified, naive_risk_ratio, ExternalRaceDistribution, POOLED_STRATUM};
use postselect::model::{crr_true, PopulationModel};
use postselect::simulator::{oracle_estimands, race_counts, sample_encounters, to_administrative};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = PopulationModel::new(0.5, [0.2, 0.1, 0.0, 0.7], 0.1, 0.2)?;
    let table = sample_encounters(&model, 200_000, 11)?;
    let admin = to_administrative(&table);
    let (d1, d0) = race_counts(&table);
    let external = ExternalRaceDistribution::fixed(POOLED_STRATUM, d1 as f64 / (d1 + d0) as f64)?;

    let x = POOLED_STRATUM;
    println!("detained records:     {}", admin.len());
    println!("naive risk ratio:     {:.4}", naive_risk_ratio(&admin, x)?);
    println!("bias factor:          {:.4}", bias_factor(&admin, &external, x)?);
    println!("adjusted risk ratio:  {:.4}", crr_identified(&admin, &external, x)?);
    println!("race contrast in sim: {:.4}", oracle_estimands(&table).crr_by_race.unwrap().value);
    println!("true causal RR:       {:.4}", crr_true(&model)?);
    Ok(())
}
