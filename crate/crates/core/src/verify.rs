//! Self-checks of the closed-form results: the published sign-paradox
//! parameterizations, the sign property for effects of one sign, the
//! mediation decomposition, a randomized paradox search and agreement of
//! closed forms with brute-force simulation.

use rand::Rng;
use rand_distr::{Dirichlet, Distribution};

use crate::model::{
    counterexamples, crr_true, estimand_value, naive_rd_true, naive_rr_true, pie_pde, theta_of, weighted_value,
    weights_of, Estimand, ModelError, PopulationModel, StratumWeights,
};
use crate::rng::{stream_rng, StreamRng};
use crate::simulator::{oracle_estimands, sample_encounters, OracleValue};

/// Slack for sign and identity checks that hold in exact arithmetic.
pub const ARITHMETIC_TOLERANCE: f64 = 1e-12;
/// Simulation agreement is judged within this many Monte Carlo SEs.
pub const ORACLE_SE_MULTIPLE: f64 = 4.0;

/// Ranges for random models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSampler {
    /// `p_d ~ U(0,1)`, `pi ~ Dirichlet(1,1,1,1)`, force rates `~ U(0,1)`.
    Uniform,
    /// Keeps every parameter away from 0 and 1 so conditional estimands are
    /// well defined at moderate sample sizes: `p_d ~ U(0.1,0.9)`,
    /// `pi ~ Dirichlet(2,2,2,2)`, force rates `~ U(0.05,0.95)`.
    Interior,
}

impl ModelSampler {
    pub fn sample(self, rng: &mut StreamRng) -> PopulationModel {
        let (p_range, alpha, mu_range) = match self {
            ModelSampler::Uniform => ((0.0, 1.0), 1.0, (0.0, 1.0)),
            ModelSampler::Interior => ((0.1, 0.9), 2.0, (0.05, 0.95)),
        };
        let dirichlet = Dirichlet::new([alpha; 4]).expect("positive concentration");
        let p_d = rng.random_range(p_range.0..p_range.1);
        let pi = dirichlet.sample(rng);
        let mu_01 = rng.random_range(mu_range.0..mu_range.1);
        let mu_11 = rng.random_range(mu_range.0..mu_range.1);
        PopulationModel::new(p_d, pi, mu_01, mu_11).expect("sampled parameters are valid")
    }
}

/// Deliberate errors for checking that the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Swap `p_d` and `1 - p_d` in the ATE_M1 weights.
    SwapPrevalenceInAteM1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub sign_models: usize,
    pub paradox_draws: usize,
    pub oracle_models: usize,
    pub oracle_n: usize,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: crate::estimator::DEFAULT_SEED,
            sign_models: 10_000,
            paradox_draws: 10_000,
            oracle_models: 20,
            oracle_n: 100_000,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Headline number of the check, if it has one.
    pub value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Closed-form estimand, honouring an injected fault.
pub fn closed_form(estimand: Estimand, model: &PopulationModel, fault: Option<Fault>) -> Result<(f64, f64), ModelError> {
    let value = match (estimand, fault) {
        (Estimand::AteM1, Some(Fault::SwapPrevalenceInAteM1)) => {
            let [al, mi, ma, _] = model.strata_masses();
            let p = model.p_d();
            let w = StratumWeights::new([al, mi * (1.0 - p), ma * p, 0.0])?;
            weighted_value(&w, &theta_of(model)).ok_or(ModelError::ZeroMass(estimand))?
        }
        _ => estimand_value(estimand, model)?,
    };
    Ok((value.normalized, value.raw))
}

pub fn check_counterexamples(fault: Option<Fault>) -> Vec<CheckResult> {
    let cases = [
        ("counterexample_positive_effects_ate_m1", counterexamples::positive_effects_negative_ate_m1(), Estimand::AteM1, "-0.003884"),
        ("counterexample_negative_effects_ate_m1", counterexamples::negative_effects_positive_ate_m1(), Estimand::AteM1, "0.002514"),
        ("counterexample_negative_effects_att_m1", counterexamples::negative_effects_positive_att_m1(), Estimand::AttM1, "0.002600"),
    ];
    cases
        .into_iter()
        .map(|(name, model, estimand, expected)| match closed_form(estimand, &model, fault) {
            Ok((_, raw)) => {
                let shown = format!("{raw:.6}");
                CheckResult {
                    name: name.into(),
                    passed: shown == expected,
                    value: Some(raw),
                    detail: format!("raw {estimand} = {shown}, expected {expected}"),
                }
            }
            Err(e) => CheckResult { name: name.into(), passed: false, value: None, detail: e.to_string() },
        })
        .collect()
}

/// Sign property and mediation identity over random models.
pub fn check_sign_property(seed: u64, models: usize) -> Vec<CheckResult> {
    let mut rng = stream_rng(seed, 1);
    let (mut positive, mut negative, mut violations) = (0usize, 0usize, 0usize);
    let mut worst_identity: f64 = 0.0;
    for _ in 0..models {
        let model = ModelSampler::Uniform.sample(&mut rng);
        let (bm, by) = (model.beta_m(), model.beta_y());
        let ate = estimand_value(Estimand::Ate, &model).expect("ATE weights are the stratum masses").normalized;
        let att = estimand_value(Estimand::Att, &model).expect("ATT weights are the stratum masses").normalized;
        if bm >= 0.0 && by >= 0.0 {
            positive += 1;
            violations += usize::from(ate.min(att) < -ARITHMETIC_TOLERANCE);
        }
        if bm <= 0.0 && by <= 0.0 {
            negative += 1;
            violations += usize::from(ate.max(att) > ARITHMETIC_TOLERANCE);
        }
        worst_identity = worst_identity.max((pie_pde(&model).total() - ate).abs());
    }
    vec![
        CheckResult {
            name: "sign_property".into(),
            passed: violations == 0,
            value: Some(violations as f64),
            detail: format!(
                "{violations} violations over {models} models ({positive} with both effects >= 0, {negative} with both <= 0)"
            ),
        },
        CheckResult {
            name: "mediation_decomposition".into(),
            passed: worst_identity <= ARITHMETIC_TOLERANCE,
            value: Some(worst_identity),
            detail: format!("max |PIE + PDE - ATE| = {worst_identity:e} over {models} models"),
        },
    ]
}

/// First draw with positive effects and negative ATE_M1, and first draw
/// with negative effects and positive ATT_M1 (normalized values).
pub fn paradox_search(seed: u64, draws: usize) -> (Option<PopulationModel>, Option<PopulationModel>) {
    let mut rng = stream_rng(seed, 2);
    let (mut positive, mut negative) = (None, None);
    for _ in 0..draws {
        let model = ModelSampler::Uniform.sample(&mut rng);
        let (bm, by) = (model.beta_m(), model.beta_y());
        if positive.is_none() && bm > 0.0 && by > 0.0 {
            if let Ok(v) = estimand_value(Estimand::AteM1, &model) {
                if v.normalized < 0.0 {
                    positive = Some(model);
                }
            }
        }
        if negative.is_none() && bm < 0.0 && by < 0.0 {
            if let Ok(v) = estimand_value(Estimand::AttM1, &model) {
                if v.normalized > 0.0 {
                    negative = Some(model);
                }
            }
        }
        if positive.is_some() && negative.is_some() {
            break;
        }
    }
    (positive, negative)
}

fn check_paradox(seed: u64, draws: usize) -> Vec<CheckResult> {
    let (positive, negative) = paradox_search(seed, draws);
    let describe = |m: &Option<PopulationModel>, e: Estimand| match m {
        Some(m) => format!(
            "found: beta_m = {:.4}, beta_y = {:.4}, {e} = {:.6}",
            m.beta_m(),
            m.beta_y(),
            estimand_value(e, m).map(|v| v.normalized).unwrap_or(f64::NAN)
        ),
        None => format!("none within {draws} draws"),
    };
    vec![
        CheckResult {
            name: "paradox_positive_effects_negative_ate_m1".into(),
            passed: positive.is_some(),
            value: positive.and_then(|m| estimand_value(Estimand::AteM1, &m).ok()).map(|v| v.normalized),
            detail: describe(&positive, Estimand::AteM1),
        },
        CheckResult {
            name: "paradox_negative_effects_positive_att_m1".into(),
            passed: negative.is_some(),
            value: negative.and_then(|m| estimand_value(Estimand::AttM1, &m).ok()).map(|v| v.normalized),
            detail: describe(&negative, Estimand::AttM1),
        },
    ]
}

/// One closed-form vs. simulated comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub model_index: usize,
    pub estimand: &'static str,
    pub closed_form: f64,
    pub simulated: OracleValue,
}

impl OracleComparison {
    /// Within [`ORACLE_SE_MULTIPLE`] SEs; a zero SE demands arithmetic agreement.
    pub fn agrees(&self) -> bool {
        let diff = (self.closed_form - self.simulated.value).abs();
        diff <= ORACLE_SE_MULTIPLE * self.simulated.se || diff <= ARITHMETIC_TOLERANCE
    }

    pub fn z(&self) -> f64 {
        (self.simulated.value - self.closed_form) / self.simulated.se
    }
}

/// Compares every closed-form estimand with a simulation of `n` encounters
/// for `models` interior random models. Model `k` is simulated with seed
/// `seed + 1 + k`.
pub fn oracle_comparisons(
    seed: u64,
    models: usize,
    n: usize,
    fault: Option<Fault>,
) -> Result<Vec<OracleComparison>, ModelError> {
    let mut rng = stream_rng(seed, 3);
    let mut out = Vec::new();
    for k in 0..models {
        let model = ModelSampler::Interior.sample(&mut rng);
        let oracle = oracle_estimands(&sample_encounters(&model, n, seed.wrapping_add(1 + k as u64))?);
        let decomposition = pie_pde(&model);
        let pairs: [(&'static str, Option<f64>, Option<OracleValue>); 9] = [
            ("ATE", closed_form(Estimand::Ate, &model, fault).ok().map(|v| v.0), oracle.ate),
            ("ATT", closed_form(Estimand::Att, &model, fault).ok().map(|v| v.0), oracle.att),
            ("ATE_M1", closed_form(Estimand::AteM1, &model, fault).ok().map(|v| v.0), oracle.ate_m1),
            ("ATT_M1", closed_form(Estimand::AttM1, &model, fault).ok().map(|v| v.0), oracle.att_m1),
            ("PIE", Some(decomposition.pie), oracle.pie),
            ("PDE", Some(decomposition.pde), oracle.pde),
            ("CRR", crr_true(&model).ok(), oracle.crr),
            ("naive_RR", naive_rr_true(&model).ok(), oracle.naive_rr),
            ("naive_RD", Some(naive_rd_true(&model)), oracle.naive_rd),
        ];
        for (estimand, closed, simulated) in pairs {
            // Interior models make every estimand defined; a missing value
            // would be a defect, reported as a failed comparison.
            out.push(OracleComparison {
                model_index: k,
                estimand,
                closed_form: closed.unwrap_or(f64::NAN),
                simulated: simulated.unwrap_or(OracleValue { value: f64::NAN, se: f64::NAN }),
            });
        }
    }
    Ok(out)
}

fn check_oracle(options: &VerifyOptions) -> CheckResult {
    let name = "oracle_agreement".to_owned();
    match oracle_comparisons(options.seed, options.oracle_models, options.oracle_n, options.fault) {
        Ok(comparisons) => {
            let failures: Vec<_> = comparisons.iter().filter(|c| !c.agrees()).collect();
            let worst = comparisons.iter().map(|c| c.z().abs()).filter(|z| z.is_finite()).fold(0.0, f64::max);
            let mut detail = format!(
                "{} of {} comparisons outside {ORACLE_SE_MULTIPLE} SE ({} models, n = {}); max |z| = {worst:.2}",
                failures.len(),
                comparisons.len(),
                options.oracle_models,
                options.oracle_n
            );
            if let Some(first) = failures.first() {
                detail.push_str(&format!(
                    "; first: model {} {} closed form {:.6} vs simulated {:.6} (se {:.2e})",
                    first.model_index, first.estimand, first.closed_form, first.simulated.value, first.simulated.se
                ));
            }
            CheckResult { name, passed: failures.is_empty(), value: Some(failures.len() as f64), detail }
        }
        Err(e) => CheckResult { name, passed: false, value: None, detail: e.to_string() },
    }
}

/// Weights of the detained-population estimands are nonnegative, so their
/// normalized and raw values share a sign.
fn check_weight_signs(seed: u64, models: usize) -> CheckResult {
    let mut rng = stream_rng(seed, 4);
    let mut bad = 0usize;
    for _ in 0..models {
        let model = ModelSampler::Uniform.sample(&mut rng);
        for e in [Estimand::AteM1, Estimand::AttM1] {
            if let Ok(w) = weights_of(e, &model) {
                bad += usize::from(w.values().iter().any(|x| *x < 0.0));
            }
        }
    }
    CheckResult {
        name: "nonnegative_weights".into(),
        passed: bad == 0,
        value: Some(bad as f64),
        detail: format!("{bad} negative weight vectors over {models} models"),
    }
}

pub fn run_verify(options: &VerifyOptions) -> VerifyReport {
    let mut checks = check_counterexamples(options.fault);
    checks.extend(check_sign_property(options.seed, options.sign_models));
    checks.push(check_weight_signs(options.seed, options.sign_models));
    checks.extend(check_paradox(options.seed, options.paradox_draws));
    checks.push(check_oracle(options));
    VerifyReport { options: *options, checks }
}
