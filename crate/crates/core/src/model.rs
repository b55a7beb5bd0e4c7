//! Closed-form estimands for the no-confounder principal stratification model.
//!
//! A [`PopulationModel`] is fully described by race prevalence, the four
//! principal-stratum masses and the two force rates given a stop. Mandatory
//! reporting is structural: the force rate without a stop is zero for both
//! races and is not a parameter.
//!
//! Every average treatment effect considered here (ATE, ATT, and the two
//! effects conditional on detainment) is a weighted average `w·θ / w·1` of
//! the stratum-specific effects [`ThetaVector`]; [`weights_of`] returns the
//! unnormalized weights and [`estimand_value`] returns both the normalized
//! average and the raw contrast `w·θ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for the stratum-mass sum and other pure-arithmetic identities.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("zero mass: {0} conditions on an event of probability zero")]
    ZeroMass(Estimand),
    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),
}

/// Civilian race: `Minority` is `D = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Race {
    Majority,
    Minority,
}

impl Race {
    pub fn from_indicator(d: u8) -> Option<Race> {
        match d {
            0 => Some(Race::Majority),
            1 => Some(Race::Minority),
            _ => None,
        }
    }

    pub fn indicator(self) -> u8 {
        match self {
            Race::Majority => 0,
            Race::Minority => 1,
        }
    }

    pub fn is_minority(self) -> bool {
        self == Race::Minority
    }
}

/// Principal stratum: the joint detainment counterfactual `(M(0), M(1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stratum {
    /// `M(0) = M(1) = 1`
    AlwaysStop,
    /// `M(0) = 0, M(1) = 1`
    MinorityStop,
    /// `M(0) = 1, M(1) = 0`
    MajorityStop,
    /// `M(0) = M(1) = 0`
    NeverStop,
}

impl Stratum {
    pub const ALL: [Stratum; 4] = [
        Stratum::AlwaysStop,
        Stratum::MinorityStop,
        Stratum::MajorityStop,
        Stratum::NeverStop,
    ];

    /// `(M(0), M(1))` for units in this stratum.
    pub fn potential_stops(self) -> (bool, bool) {
        match self {
            Stratum::AlwaysStop => (true, true),
            Stratum::MinorityStop => (false, true),
            Stratum::MajorityStop => (true, false),
            Stratum::NeverStop => (false, false),
        }
    }

    pub fn from_potential_stops(m0: bool, m1: bool) -> Stratum {
        match (m0, m1) {
            (true, true) => Stratum::AlwaysStop,
            (false, true) => Stratum::MinorityStop,
            (true, false) => Stratum::MajorityStop,
            (false, false) => Stratum::NeverStop,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            Stratum::AlwaysStop => "al",
            Stratum::MinorityStop => "mi",
            Stratum::MajorityStop => "ma",
            Stratum::NeverStop => "ne",
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimand {
    Ate,
    Att,
    /// Effect among detained civilians.
    AteM1,
    /// Effect among detained minority civilians.
    AttM1,
}

impl Estimand {
    pub const ALL: [Estimand; 4] = [Estimand::Ate, Estimand::Att, Estimand::AteM1, Estimand::AttM1];

    pub fn name(self) -> &'static str {
        match self {
            Estimand::Ate => "ATE",
            Estimand::Att => "ATT",
            Estimand::AteM1 => "ATE_M1",
            Estimand::AttM1 => "ATT_M1",
        }
    }
}

impl fmt::Display for Estimand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "ATE" => Ok(Estimand::Ate),
            "ATT" => Ok(Estimand::Att),
            "ATE_M1" => Ok(Estimand::AteM1),
            "ATT_M1" => Ok(Estimand::AttM1),
            other => Err(format!("unknown estimand `{other}`")),
        }
    }
}

/// Flat record used for (de)serializing a [`PopulationModel`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRecord {
    p_d: f64,
    pi_al: f64,
    pi_mi: f64,
    pi_ma: f64,
    pi_ne: f64,
    mu_01: f64,
    mu_11: f64,
}

/// Parametric generative model for one covariate cell.
///
/// Fields are private so that every value in circulation satisfies the
/// invariants: all entries in `[0, 1]` and stratum masses summing to one
/// within [`PROBABILITY_TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRecord", into = "ModelRecord")]
pub struct PopulationModel {
    p_d: f64,
    pi: [f64; 4],
    mu_01: f64,
    mu_11: f64,
}

impl TryFrom<ModelRecord> for PopulationModel {
    type Error = ModelError;

    fn try_from(r: ModelRecord) -> Result<Self, Self::Error> {
        PopulationModel::new(r.p_d, [r.pi_al, r.pi_mi, r.pi_ma, r.pi_ne], r.mu_01, r.mu_11)
    }
}

impl From<PopulationModel> for ModelRecord {
    fn from(m: PopulationModel) -> Self {
        ModelRecord {
            p_d: m.p_d,
            pi_al: m.pi[0],
            pi_mi: m.pi[1],
            pi_ma: m.pi[2],
            pi_ne: m.pi[3],
            mu_01: m.mu_01,
            mu_11: m.mu_11,
        }
    }
}

fn check_probability(name: &str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ModelError::InvalidModel(format!("{name} = {value} is not a probability")))
    }
}

impl PopulationModel {
    /// `pi` is ordered `(al, mi, ma, ne)`.
    pub fn new(p_d: f64, pi: [f64; 4], mu_01: f64, mu_11: f64) -> Result<Self, ModelError> {
        check_probability("p_d", p_d)?;
        for (s, &mass) in Stratum::ALL.iter().zip(&pi) {
            check_probability(&format!("pi_{s}"), mass)?;
        }
        check_probability("mu_01", mu_01)?;
        check_probability("mu_11", mu_11)?;
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(ModelError::InvalidModel(format!(
                "stratum masses sum to {total}, expected 1"
            )));
        }
        Ok(PopulationModel { p_d, pi, mu_01, mu_11 })
    }

    /// Builds a model from effect-scale parameters: `pi_mi = pi_ma + beta_m`,
    /// `mu_11 = mu_01 + beta_y`, and `pi_ne` takes the remaining mass.
    pub fn from_effects(
        p_d: f64,
        pi_al: f64,
        pi_ma: f64,
        beta_m: f64,
        mu_01: f64,
        beta_y: f64,
    ) -> Result<Self, ModelError> {
        let pi_mi = pi_ma + beta_m;
        let pi_ne = 1.0 - pi_al - pi_mi - pi_ma;
        PopulationModel::new(p_d, [pi_al, pi_mi, pi_ma, pi_ne], mu_01, mu_01 + beta_y)
    }

    pub fn p_d(&self) -> f64 {
        self.p_d
    }

    pub fn pi(&self, s: Stratum) -> f64 {
        self.pi[s.index()]
    }

    pub fn strata_masses(&self) -> [f64; 4] {
        self.pi
    }

    /// `E[Y(0, 1)]`
    pub fn mu_01(&self) -> f64 {
        self.mu_01
    }

    /// `E[Y(1, 1)]`
    pub fn mu_11(&self) -> f64 {
        self.mu_11
    }

    /// Force rate given a stop for race `d`.
    pub fn mu_stopped(&self, d: Race) -> f64 {
        match d {
            Race::Majority => self.mu_01,
            Race::Minority => self.mu_11,
        }
    }

    /// Effect of race on detainment, `pi_mi - pi_ma`.
    pub fn beta_m(&self) -> f64 {
        self.pi[1] - self.pi[2]
    }

    /// Controlled direct effect of race on force given a stop.
    pub fn beta_y(&self) -> f64 {
        self.mu_11 - self.mu_01
    }

    /// `E[M(d)]`
    pub fn stop_rate(&self, d: Race) -> f64 {
        match d {
            Race::Majority => self.pi[0] + self.pi[2],
            Race::Minority => self.pi[0] + self.pi[1],
        }
    }

    /// `P(M = 1)`
    pub fn detained_mass(&self) -> f64 {
        self.p_d * self.stop_rate(Race::Minority) + (1.0 - self.p_d) * self.stop_rate(Race::Majority)
    }

    /// `P(D = 1 | M = 1)`, or `None` when nobody is detained.
    pub fn minority_share_detained(&self) -> Option<f64> {
        let mass = self.detained_mass();
        (mass > 0.0).then(|| self.p_d * self.stop_rate(Race::Minority) / mass)
    }
}

/// Stratum-specific effects `E[Y(1) - Y(0) | S = s]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaVector {
    pub al: f64,
    pub mi: f64,
    pub ma: f64,
    pub ne: f64,
}

impl ThetaVector {
    pub fn get(&self, s: Stratum) -> f64 {
        self.as_array()[s.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.al, self.mi, self.ma, self.ne]
    }
}

/// Nonnegative weights over the four strata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StratumWeights {
    values: [f64; 4],
    normalized: bool,
}

impl StratumWeights {
    fn unnormalized(values: [f64; 4]) -> Self {
        debug_assert!(values.iter().all(|w| *w >= 0.0));
        StratumWeights { values, normalized: false }
    }

    /// Unnormalized weights, ordered `(al, mi, ma, ne)`.
    pub fn new(values: [f64; 4]) -> Result<Self, ModelError> {
        if values.iter().all(|w| w.is_finite() && *w >= 0.0) {
            Ok(StratumWeights::unnormalized(values))
        } else {
            Err(ModelError::InvalidModel(format!("weights {values:?} must be finite and nonnegative")))
        }
    }

    pub fn get(&self, s: Stratum) -> f64 {
        self.values[s.index()]
    }

    pub fn values(&self) -> [f64; 4] {
        self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Rescales to sum one. Returns `None` when all weights are zero.
    pub fn normalize(&self) -> Option<StratumWeights> {
        let total = self.total();
        if total <= 0.0 {
            return None;
        }
        let mut values = self.values;
        values.iter_mut().for_each(|w| *w /= total);
        Some(StratumWeights { values, normalized: true })
    }

    pub fn dot(&self, theta: &ThetaVector) -> f64 {
        self.values.iter().zip(theta.as_array()).map(|(w, t)| w * t).sum()
    }
}

/// Normalized weighted average together with the raw contrast `w·θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimandValue {
    pub normalized: f64,
    pub raw: f64,
    /// `w·1` for the unnormalized weights.
    pub mass: f64,
}

pub fn theta_of(model: &PopulationModel) -> ThetaVector {
    ThetaVector {
        al: model.beta_y(),
        mi: model.mu_11,
        ma: -model.mu_01,
        ne: 0.0,
    }
}

/// Unnormalized principal-stratum weights for `estimand`.
pub fn weights_of(estimand: Estimand, model: &PopulationModel) -> Result<StratumWeights, ModelError> {
    let [al, mi, ma, ne] = model.pi;
    let p = model.p_d;
    let weights = match estimand {
        Estimand::Ate | Estimand::Att => {
            return Ok(StratumWeights { values: [al, mi, ma, ne], normalized: true });
        }
        Estimand::AteM1 => StratumWeights::unnormalized([al, mi * p, ma * (1.0 - p), 0.0]),
        Estimand::AttM1 => StratumWeights::unnormalized([al, mi, 0.0, 0.0]),
    };
    if weights.total() > 0.0 {
        Ok(weights)
    } else {
        Err(ModelError::ZeroMass(estimand))
    }
}

pub fn estimand_value(estimand: Estimand, model: &PopulationModel) -> Result<EstimandValue, ModelError> {
    weighted_value(&weights_of(estimand, model)?, &theta_of(model)).ok_or(ModelError::ZeroMass(estimand))
}

/// `w·θ / w·1` and `w·θ` for arbitrary weights; `None` when `w·1 = 0`.
pub fn weighted_value(weights: &StratumWeights, theta: &ThetaVector) -> Option<EstimandValue> {
    let raw = weights.dot(theta);
    let mass = weights.total();
    (mass > 0.0).then(|| EstimandValue { normalized: raw / mass, raw, mass })
}

/// Pure indirect and pure direct effects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediationDecomposition {
    pub pie: f64,
    pub pde: f64,
}

impl MediationDecomposition {
    pub fn total(&self) -> f64 {
        self.pie + self.pde
    }
}

pub fn pie_pde(model: &PopulationModel) -> MediationDecomposition {
    MediationDecomposition {
        pie: model.beta_m() * model.mu_11,
        pde: model.beta_y() * model.stop_rate(Race::Majority),
    }
}

/// `E[Y(d)] = E[Y | M = 1, D = d] · P(M = 1 | D = d)`.
pub fn identify_ey(d: Race, model: &PopulationModel) -> f64 {
    model.mu_stopped(d) * model.stop_rate(d)
}

/// Causal risk ratio `E[Y(1)] / E[Y(0)]`.
pub fn crr_true(model: &PopulationModel) -> Result<f64, ModelError> {
    let denominator = identify_ey(Race::Majority, model);
    if denominator <= 0.0 {
        return Err(ModelError::ZeroDenominator("E[Y(0)] is zero"));
    }
    Ok(identify_ey(Race::Minority, model) / denominator)
}

/// Risk ratio among detained civilians, `E[Y | D=1, M=1] / E[Y | D=0, M=1]`.
///
/// Under independent errors the force rate given a stop does not depend on
/// the stratum, so this is `mu_11 / mu_01`.
pub fn naive_rr_true(model: &PopulationModel) -> Result<f64, ModelError> {
    if model.mu_01 <= 0.0 {
        return Err(ModelError::ZeroDenominator("E[Y | D=0, M=1] is zero"));
    }
    Ok(model.mu_11 / model.mu_01)
}

/// Risk difference among detained civilians; equals `beta_y` here.
pub fn naive_rd_true(model: &PopulationModel) -> f64 {
    model.beta_y()
}

/// The three sign-paradox parameterizations: both effects of one sign
/// while the detained-population estimand has the other.
pub mod counterexamples {
    use super::PopulationModel;

    fn build(beta: f64, p_d: f64) -> PopulationModel {
        PopulationModel::from_effects(p_d, 0.1, 0.05, beta, 0.1, beta)
            .expect("counterexample parameters are valid")
    }

    /// `beta_m = beta_y = 0.01`, `P(D=1) = 0.01`; raw ATE_M1 is -0.003884.
    pub fn positive_effects_negative_ate_m1() -> PopulationModel {
        build(0.01, 0.01)
    }

    /// `beta_m = beta_y = -0.01`, `P(D=1) = 0.99`; raw ATE_M1 is 0.002514.
    pub fn negative_effects_positive_ate_m1() -> PopulationModel {
        build(-0.01, 0.99)
    }

    /// `beta_m = beta_y = -0.01`, `P(D=1) = 0.01`; raw ATT_M1 is 0.0026.
    pub fn negative_effects_positive_att_m1() -> PopulationModel {
        build(-0.01, 0.01)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy() -> PopulationModel {
        PopulationModel::new(0.5, [0.2, 0.1, 0.0, 0.7], 0.1, 0.2).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn theta_examples() {
        let m = counterexamples::positive_effects_negative_ate_m1();
        let t = theta_of(&m);
        assert!(close(t.al, 0.01) && close(t.mi, 0.11) && close(t.ma, -0.1));
        assert_eq!(t.ne, 0.0);

        let zero = PopulationModel::new(0.3, [0.2, 0.1, 0.0, 0.7], 0.0, 0.0).unwrap();
        let t = theta_of(&zero);
        assert_eq!(t.as_array(), [0.0, 0.0, -0.0, 0.0]);

        let t = theta_of(&toy());
        assert!(close(t.al, 0.1) && close(t.mi, 0.2) && close(t.ma, -0.1) && t.ne == 0.0);
    }

    #[test]
    fn weight_examples() {
        let m = counterexamples::positive_effects_negative_ate_m1();
        let w = weights_of(Estimand::AteM1, &m).unwrap().values();
        for (got, want) in w.iter().zip([0.1, 0.0006, 0.0495, 0.0]) {
            assert!(close(*got, want), "{w:?}");
        }
        let w = weights_of(Estimand::AttM1, &m).unwrap().values();
        for (got, want) in w.iter().zip([0.1, 0.06, 0.0, 0.0]) {
            assert!(close(*got, want), "{w:?}");
        }
        let w = weights_of(Estimand::Ate, &toy()).unwrap();
        assert_eq!(w.values(), [0.2, 0.1, 0.0, 0.7]);
        assert!(w.is_normalized());
    }

    #[test]
    fn nobody_stopped_is_zero_mass() {
        let m = PopulationModel::new(0.4, [0.0, 0.0, 0.0, 1.0], 0.2, 0.3).unwrap();
        assert_eq!(weights_of(Estimand::AteM1, &m), Err(ModelError::ZeroMass(Estimand::AteM1)));
        assert_eq!(weights_of(Estimand::AttM1, &m), Err(ModelError::ZeroMass(Estimand::AttM1)));
        assert!(estimand_value(Estimand::Ate, &m).is_ok());
    }

    #[test]
    fn raw_contrasts_match_published_counterexamples() {
        let v = estimand_value(Estimand::AteM1, &counterexamples::positive_effects_negative_ate_m1()).unwrap();
        assert!((v.raw - -0.003884).abs() < 5e-13, "{}", v.raw);
        assert!(v.normalized < 0.0);
        let v = estimand_value(Estimand::AteM1, &counterexamples::negative_effects_positive_ate_m1()).unwrap();
        assert!((v.raw - 0.002514).abs() < 5e-13, "{}", v.raw);
        assert!(v.normalized > 0.0);
        let v = estimand_value(Estimand::AttM1, &counterexamples::negative_effects_positive_att_m1()).unwrap();
        assert!((v.raw - 0.0026).abs() < 5e-13, "{}", v.raw);
        assert!(v.normalized > 0.0);
    }

    #[test]
    fn toy_model_values() {
        let m = toy();
        let d = pie_pde(&m);
        assert!(close(d.pie, 0.02) && close(d.pde, 0.02));
        let ate = estimand_value(Estimand::Ate, &m).unwrap().normalized;
        assert!(close(ate, 0.04));
        assert!(close(crr_true(&m).unwrap(), 3.0));
        assert!(close(identify_ey(Race::Minority, &m), 0.06));
        assert!(close(identify_ey(Race::Majority, &m), 0.02));
        assert!(close(m.detained_mass(), 0.25));
        assert!(close(m.minority_share_detained().unwrap(), 0.6));
        assert!(close(naive_rr_true(&m).unwrap(), 2.0));
    }

    #[test]
    fn degenerate_effects() {
        let no_detain_effect = PopulationModel::new(0.5, [0.3, 0.1, 0.1, 0.5], 0.1, 0.4).unwrap();
        assert_eq!(pie_pde(&no_detain_effect).pie, 0.0);
        let no_direct = PopulationModel::new(0.5, [0.3, 0.2, 0.1, 0.4], 0.25, 0.25).unwrap();
        assert_eq!(pie_pde(&no_direct).pde, 0.0);

        let symmetric = PopulationModel::new(0.3, [0.3, 0.15, 0.15, 0.4], 0.2, 0.2).unwrap();
        assert!(close(crr_true(&symmetric).unwrap(), 1.0));
        let no_race = PopulationModel::new(0.3, [0.6, 0.0, 0.0, 0.4], 0.2, 0.2).unwrap();
        assert!(close(crr_true(&no_race).unwrap(), 1.0));

        let no_force = PopulationModel::new(0.3, [0.6, 0.0, 0.0, 0.4], 0.0, 0.2).unwrap();
        assert!(matches!(crr_true(&no_force), Err(ModelError::ZeroDenominator(_))));
        let none_minority = PopulationModel::new(0.3, [0.6, 0.0, 0.0, 0.4], 0.1, 0.0).unwrap();
        assert_eq!(identify_ey(Race::Minority, &none_minority), 0.0);
    }

    #[test]
    fn rejects_invalid_models() {
        assert!(PopulationModel::new(1.2, [0.25; 4], 0.1, 0.1).is_err());
        assert!(PopulationModel::new(0.5, [0.3, 0.3, 0.3, 0.3], 0.1, 0.1).is_err());
        assert!(PopulationModel::new(0.5, [0.25; 4], f64::NAN, 0.1).is_err());
        assert!(PopulationModel::new(0.5, [-0.1, 0.4, 0.4, 0.3], 0.1, 0.1).is_err());
        assert!(PopulationModel::from_effects(0.5, 0.5, 0.4, 0.3, 0.1, 0.0).is_err());
    }

    #[test]
    fn flat_record_round_trip() {
        let text = "p_d = 0.5\npi_al = 0.2\npi_mi = 0.1\npi_ma = 0.0\npi_ne = 0.7\nmu_01 = 0.1\nmu_11 = 0.2\n";
        let m: PopulationModel = toml::from_str(text).unwrap();
        assert_eq!(m, toy());
        let back: PopulationModel = toml::from_str(&toml::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let bad = text.replace("pi_ne = 0.7", "pi_ne = 0.8");
        assert!(toml::from_str::<PopulationModel>(&bad).is_err());
    }

    prop_compose! {
        fn any_model()(p_d in 0.0..=1.0f64,
                       raw in prop::array::uniform4(0.0..1.0f64),
                       mu_01 in 0.0..=1.0f64,
                       mu_11 in 0.0..=1.0f64) -> PopulationModel {
            let total: f64 = raw.iter().sum::<f64>() + 1e-9;
            let al = raw[0] / total;
            let mi = raw[1] / total;
            let ma = raw[2] / total;
            PopulationModel::new(p_d, [al, mi, ma, 1.0 - al - mi - ma], mu_01, mu_11).unwrap()
        }
    }

    proptest! {
        #[test]
        fn decomposition_identity(m in any_model()) {
            let ate = estimand_value(Estimand::Ate, &m).unwrap().normalized;
            prop_assert!((pie_pde(&m).total() - ate).abs() <= 1e-12);
            prop_assert_eq!(theta_of(&m).ne, 0.0);
        }

        #[test]
        fn identified_ratio_is_crr(m in any_model()) {
            if let Ok(crr) = crr_true(&m) {
                let ratio = identify_ey(Race::Minority, &m) / identify_ey(Race::Majority, &m);
                prop_assert!((ratio - crr).abs() <= 1e-12 * crr.max(1.0));
            }
        }

        #[test]
        fn normalized_sign_matches_raw(m in any_model()) {
            for e in Estimand::ALL {
                if let Ok(v) = estimand_value(e, &m) {
                    prop_assert!(v.raw.signum() == v.normalized.signum() || v.raw == 0.0);
                    prop_assert!(weights_of(e, &m).unwrap().values().iter().all(|w| *w >= 0.0));
                }
            }
        }

        #[test]
        fn monotone_detainment_naive_rr_is_lower_bound(
            p_d in 0.0..=1.0f64, al in 0.01..1.0f64, mi_frac in 0.0..1.0f64,
            mu_01 in 0.01..=1.0f64, mu_11 in 0.0..=1.0f64,
        ) {
            let mi = (1.0 - al) * mi_frac;
            let m = PopulationModel::new(p_d, [al, mi, 0.0, 1.0 - al - mi], mu_01, mu_11).unwrap();
            prop_assert!(naive_rr_true(&m).unwrap() <= crr_true(&m).unwrap() + 1e-12);
        }
    }
}
