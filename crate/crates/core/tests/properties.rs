//! Model-level invariants checked against exact population enumeration.

use postselect::estimator::{
    bias_factor_from_shares, bootstrap, crr_identified, sensitivity_mixture, AdministrativeDataset, BootstrapConfig,
    Estimator, ExternalRaceDistribution, POOLED_STRATUM,
};
use postselect::model::{estimand_value, weights_of, Estimand, PopulationModel, Race, Stratum};
use postselect::simulator::{enumerate_population, population_estimands, sample_encounters, to_administrative};
use postselect::verify::check_sign_property;
use proptest::prelude::*;

fn model() -> impl Strategy<Value = PopulationModel> {
    (0.01f64..0.99, prop::array::uniform4(0.01f64..1.0), 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(p, raw, mu01, mu11)| {
        let total: f64 = raw.iter().sum();
        PopulationModel::new(p, raw.map(|v| v / total), mu01, mu11).unwrap()
    })
}

/// `P(S = s | M = 1)` and `P(S = s | D = 1, M = 1)` by summing the population.
fn detained_strata(model: &PopulationModel) -> ([f64; 4], [f64; 4]) {
    let (mut all, mut minority) = ([0.0; 4], [0.0; 4]);
    for (e, w) in enumerate_population(model) {
        if e.m {
            all[e.s.index()] += w;
            if e.d == Race::Minority {
                minority[e.s.index()] += w;
            }
        }
    }
    let normalize = |v: [f64; 4]| {
        let t: f64 = v.iter().sum();
        v.map(|x| x / t)
    };
    (normalize(all), normalize(minority))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn detained_estimand_weights_match_conditional_strata(model in model()) {
        let (given_m, given_dm) = detained_strata(&model);
        let ate_m1 = weights_of(Estimand::AteM1, &model).unwrap().normalize().unwrap().values();
        let att_m1 = weights_of(Estimand::AttM1, &model).unwrap().normalize().unwrap().values();
        for s in Stratum::ALL {
            prop_assert!(close(ate_m1[s.index()], given_m[s.index()]), "{:?}: {:?} vs {:?}", s, ate_m1, given_m);
            prop_assert!(close(att_m1[s.index()], given_dm[s.index()]), "{:?}: {:?} vs {:?}", s, att_m1, given_dm);
        }
    }

    #[test]
    fn closed_forms_match_population_averages(model in model()) {
        let exact = population_estimands(&model);
        for (estimand, oracle) in [
            (Estimand::Ate, exact.ate),
            (Estimand::Att, exact.att),
            (Estimand::AteM1, exact.ate_m1),
            (Estimand::AttM1, exact.att_m1),
        ] {
            let closed = estimand_value(estimand, &model).unwrap().normalized;
            prop_assert!(close(closed, oracle.unwrap().value), "{:?}", estimand);
        }
        let ate = exact.ate.unwrap().value;
        prop_assert!(close(exact.pie.unwrap().value + exact.pde.unwrap().value, ate));
        prop_assert!(close(exact.pie.unwrap().value, model.beta_m() * model.mu_11()));
    }

    #[test]
    fn bias_factor_closes_the_gap(model in model()) {
        let exact = population_estimands(&model);
        let (Some(naive), Some(crr)) = (exact.naive_rr, exact.crr_by_race) else {
            return Ok(());
        };
        let factor = bias_factor_from_shares(exact.detained_share.unwrap(), model.p_d()).unwrap();
        prop_assert!(close(naive.value * factor, crr.value), "{} * {} vs {}", naive.value, factor, crr.value);
    }

    #[test]
    fn mixing_moves_monotonically(local in 0.02f64..0.98, city in 0.02f64..0.98, n1 in 1u32..50, n0 in 1u32..50) {
        let mut data = AdministrativeDataset::new();
        for i in 0..n1 {
            data.push(Race::Minority, i % 2 == 0, POOLED_STRATUM);
        }
        for i in 0..n0 {
            data.push(Race::Majority, i % 3 == 0, POOLED_STRATUM);
        }
        let base = ExternalRaceDistribution::fixed(POOLED_STRATUM, local).unwrap();
        let path: Vec<f64> = (0..=10)
            .map(|k| {
                let mixed = sensitivity_mixture(&base, city, f64::from(k) / 10.0).unwrap();
                crr_identified(&data, &mixed, POOLED_STRATUM).unwrap()
            })
            .collect();
        let rising = path.windows(2).all(|w| w[1] >= w[0] - 1e-12);
        let falling = path.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        prop_assert!(rising || falling, "{:?}", path);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let model = PopulationModel::new(0.5, [0.2, 0.1, 0.0, 0.7], 0.1, 0.2).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let table = sample_encounters(&model, 200_000, 9).unwrap();
            let data = to_administrative(&table);
            let ext = ExternalRaceDistribution::fixed(POOLED_STRATUM, 0.5).unwrap();
            let config = BootstrapConfig { replicates: 300, ..Default::default() };
            (table.rows, bootstrap(Estimator::CrrIdentified, &data, Some(&ext), POOLED_STRATUM, &config))
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn sign_verdict_is_stable_across_seeds() {
    for seed in 0..10 {
        let checks = check_sign_property(seed, 2_000);
        assert!(checks.iter().all(|c| c.passed), "seed {seed}: {checks:?}");
    }
}
