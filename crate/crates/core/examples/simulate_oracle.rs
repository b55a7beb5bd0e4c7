//! Simulate encounters from a population model and compare brute-force
//! averages over potential outcomes with the closed forms.

use postselect::model::{crr_true, estimand_value, naive_rr_true, pie_pde, Estimand, PopulationModel};
use postselect::simulator::{oracle_estimands, sample_encounters};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 20% always stopped, 10% stopped only if minority, 70% never stopped.
    let model = PopulationModel::new(0.5, [0.2, 0.1, 0.0, 0.7], 0.1, 0.2)?;
    let table = sample_encounters(&model, 100_000, 7)?;
    let oracle = oracle_estimands(&table);
    let decomposition = pie_pde(&model);

    let closed = [
        ("ATE", estimand_value(Estimand::Ate, &model)?.normalized),
        ("ATT", estimand_value(Estimand::Att, &model)?.normalized),
        ("ATE_M1", estimand_value(Estimand::AteM1, &model)?.normalized),
        ("ATT_M1", estimand_value(Estimand::AttM1, &model)?.normalized),
        ("PIE", decomposition.pie),
        ("PDE", decomposition.pde),
        ("CRR", crr_true(&model)?),
    ];
    println!("{} encounters, {} detained", oracle.n, oracle.n_detained);
    println!("{:<8} {:>10} {:>10} {:>8} {:>6}", "", "closed", "simulated", "se", "z");
    for ((name, exact), (_, sim)) in closed.iter().zip(oracle.fields()) {
        let sim = sim.expect("defined for this model");
        println!("{name:<8} {exact:>10.5} {:>10.5} {:>8.5} {:>6.2}", sim.value, sim.se, (sim.value - exact) / sim.se);
    }
    let naive = oracle.naive_rr.unwrap();
    println!("naive RR among detainees: {:.4} (closed form {:.4})", naive.value, naive_rr_true(&model)?);
    Ok(())
}
