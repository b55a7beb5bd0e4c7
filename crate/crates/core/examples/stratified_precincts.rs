//! Per-precinct estimates for two synthetic precincts with different
//! stopping behaviour, each compared with its own true causal risk ratio.

use postselect::estimator::{stratified_estimates, AdministrativeDataset, BootstrapConfig, ExternalRaceDistribution};
use postselect::model::{crr_true, PopulationModel};
use postselect::simulator::{race_counts, sample_encounters_in, to_administrative};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let precincts = [
        ("north", PopulationModel::new(0.3, [0.15, 0.15, 0.02, 0.68], 0.08, 0.12)?),
        ("south", PopulationModel::new(0.7, [0.25, 0.05, 0.05, 0.65], 0.10, 0.15)?),
    ];
    let mut admin = AdministrativeDataset::new();
    let mut shares = Vec::new();
    for (i, (name, model)) in precincts.iter().enumerate() {
        let table = sample_encounters_in(model, 100_000, 100 + i as u64, name)?;
        admin.extend_from(&to_administrative(&table));
        let (d1, d0) = race_counts(&table);
        shares.push((*name, Some(d1 as f64 / (d1 + d0) as f64)));
    }
    let census = ExternalRaceDistribution::census(shares)?;
    let strata: Vec<String> = admin.stratum_keys().to_vec();
    let rows = stratified_estimates(&admin, Some(&census), &strata, &BootstrapConfig { replicates: 500, ..Default::default() })?;

    for (row, (_, model)) in rows.iter().zip(&precincts) {
        let naive = row.naive.as_ref().map(|e| format!("{:.3} [{:.3}, {:.3}]", e.point, e.lo, e.hi));
        let adjusted = row.adjusted.as_ref().unwrap().as_ref().map(|e| format!("{:.3} [{:.3}, {:.3}]", e.point, e.lo, e.hi));
        println!(
            "{:<6} naive {}  adjusted {}  true {:.3}",
            row.stratum,
            naive.unwrap_or_else(|e| e.to_string()),
            adjusted.unwrap_or_else(|e| e.to_string()),
            crr_true(model)?
        );
    }
    Ok(())
}
