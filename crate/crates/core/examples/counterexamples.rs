//! Effects that are positive for every civilian can still produce a
//! negative average effect among those who were stopped, and vice versa.
//!
//! Run with `cargo run --example counterexamples`.

use postselect::model::{counterexamples, estimand_value, Estimand, PopulationModel};

fn show(label: &str, model: &PopulationModel, estimand: Estimand) {
    let v = estimand_value(estimand, model).expect("stopped population is nonempty");
    println!(
        "{label:<34} beta_m = {:+.2}  beta_y = {:+.2}  {estimand}: raw {:+.6}  normalized {:+.6}",
        model.beta_m(),
        model.beta_y(),
        v.raw,
        v.normalized
    );
}

fn main() {
    show("positive effects, P(D=1) = 0.01", &counterexamples::positive_effects_negative_ate_m1(), Estimand::AteM1);
    show("negative effects, P(D=1) = 0.99", &counterexamples::negative_effects_positive_ate_m1(), Estimand::AteM1);
    show("negative effects, P(D=1) = 0.01", &counterexamples::negative_effects_positive_att_m1(), Estimand::AttM1);

    // The population-wide effect always has the sign of the two effects.
    let m = counterexamples::positive_effects_negative_ate_m1();
    println!("ATE of the first model: {:+.6}", estimand_value(Estimand::Ate, &m).unwrap().normalized);
}
