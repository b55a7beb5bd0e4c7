//! If some encounters in a precinct involve non-residents, the local census
//! share misstates the encounter share. Mixing it with a city-wide share
//! pulls extreme precincts toward the city-wide estimate.

use postselect::estimator::{crr_identified, sensitivity_mixture, AdministrativeDataset, ExternalRaceDistribution};
use postselect::model::Race;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // One mostly-majority and one mostly-minority precinct.
    let mut admin = AdministrativeDataset::new();
    for (key, [m_force, m_none, w_force, w_none]) in [("uptown", [12, 88, 20, 380]), ("harbor", [60, 540, 4, 96])] {
        for (d, y, count) in [
            (Race::Minority, true, m_force),
            (Race::Minority, false, m_none),
            (Race::Majority, true, w_force),
            (Race::Majority, false, w_none),
        ] {
            (0..count).for_each(|_| admin.push(d, y, key));
        }
    }
    let census = ExternalRaceDistribution::census([("uptown", Some(0.05)), ("harbor", Some(0.92))])?;
    let citywide = 0.367;

    println!("{:<8} {:>8} {:>10} {:>10}", "precinct", "lambda", "p1'", "CRR");
    for key in ["uptown", "harbor"] {
        for lambda in [1.0, 0.9, 0.5, 0.0] {
            let mixed = sensitivity_mixture(&census, citywide, lambda)?;
            println!("{key:<8} {lambda:>8.1} {:>10.4} {:>10.3}", mixed.p1(key)?, crr_identified(&admin, &mixed, key)?);
        }
    }
    Ok(())
}
