//! Synthetic encounter populations with full potential outcomes.
//!
//! [`sample_encounters`] draws from the independent-errors structural model:
//! race, principal stratum and the two force-given-stop outcomes are drawn
//! independently. [`oracle_estimands`] then computes every estimand by
//! direct averaging over the rows, using no model formulas, which makes it
//! an independent check on the closed forms in [`crate::model`].
//! [`enumerate_population`] is the exact counterpart: all 32 cells of the
//! joint distribution with their probabilities.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::estimator::{AdministrativeDataset, POOLED_STRATUM};
use crate::model::{ModelError, PopulationModel, Race, Stratum};
use crate::rng::stream_rng;

/// Rows drawn per RNG stream. Fixed so output is independent of thread count.
pub const SHARD_SIZE: usize = 1 << 16;

/// One police-civilian encounter with its potential outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encounter {
    pub d: Race,
    pub s: Stratum,
    pub m0: bool,
    pub m1: bool,
    /// `Y(0, 1)`
    pub y01: bool,
    /// `Y(1, 1)`
    pub y11: bool,
    pub m: bool,
    pub y: bool,
}

impl Encounter {
    /// Fills the potential detainments from `s` and the observed values by
    /// consistency; force without a stop is zero.
    pub fn new(d: Race, s: Stratum, y01: bool, y11: bool) -> Self {
        let (m0, m1) = s.potential_stops();
        let (m, y) = match d {
            Race::Minority => (m1, m1 && y11),
            Race::Majority => (m0, m0 && y01),
        };
        Encounter { d, s, m0, m1, y01, y11, m, y }
    }

    /// `Y(1) = Y(1, M(1))`
    pub fn y1(&self) -> bool {
        self.m1 && self.y11
    }

    /// `Y(0) = Y(0, M(0))`
    pub fn y0(&self) -> bool {
        self.m0 && self.y01
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncounterTable {
    pub rows: Vec<Encounter>,
    pub seed: u64,
    pub model: PopulationModel,
    /// Covariate key shared by every row of the table.
    pub stratum: String,
}

fn draw_encounter<R: Rng>(model: &PopulationModel, rng: &mut R) -> Encounter {
    let d = if rng.random::<f64>() < model.p_d() { Race::Minority } else { Race::Majority };
    let u: f64 = rng.random();
    let masses = model.strata_masses();
    let mut acc = 0.0;
    let mut s = Stratum::NeverStop;
    for (stratum, mass) in Stratum::ALL.iter().zip(masses) {
        acc += mass;
        if u < acc {
            s = *stratum;
            break;
        }
    }
    let y01 = rng.random::<f64>() < model.mu_01();
    let y11 = rng.random::<f64>() < model.mu_11();
    Encounter::new(d, s, y01, y11)
}

/// Draws `n` encounters in the pooled stratum.
pub fn sample_encounters(model: &PopulationModel, n: usize, seed: u64) -> Result<EncounterTable, ModelError> {
    sample_encounters_in(model, n, seed, POOLED_STRATUM)
}

/// Draws `n` encounters labelled with covariate key `stratum`.
pub fn sample_encounters_in(
    model: &PopulationModel,
    n: usize,
    seed: u64,
    stratum: &str,
) -> Result<EncounterTable, ModelError> {
    if n == 0 {
        return Err(ModelError::InvalidModel("sample size must be at least 1".into()));
    }
    // Re-validate: models can only be built valid, but a deserialized copy
    // could have been produced by a different version.
    let model = PopulationModel::new(model.p_d(), model.strata_masses(), model.mu_01(), model.mu_11())?;
    let shards = n.div_ceil(SHARD_SIZE);
    let rows = (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let len = SHARD_SIZE.min(n - k * SHARD_SIZE);
            (0..len).map(|_| draw_encounter(&model, &mut rng)).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    Ok(EncounterTable { rows, seed, model, stratum: stratum.to_owned() })
}

/// The detained rows, projected to `(d, y, x)`, in order.
pub fn to_administrative(table: &EncounterTable) -> AdministrativeDataset {
    let mut data = AdministrativeDataset::new();
    for row in table.rows.iter().filter(|r| r.m) {
        data.push(row.d, row.y, &table.stratum);
    }
    data
}

/// Encounter counts by race `(minority, majority)`; the census counts a
/// simulated population would report about itself.
pub fn race_counts(table: &EncounterTable) -> (u64, u64) {
    let minority = table.rows.iter().filter(|r| r.d.is_minority()).count() as u64;
    (minority, table.rows.len() as u64 - minority)
}

/// Every cell of the joint distribution of `(D, S, Y(0,1), Y(1,1))` with
/// its probability. Cells of probability zero are omitted.
pub fn enumerate_population(model: &PopulationModel) -> Vec<(Encounter, f64)> {
    let bern = |p: f64, v: bool| if v { p } else { 1.0 - p };
    let mut cells = Vec::with_capacity(32);
    for d in [Race::Majority, Race::Minority] {
        for s in Stratum::ALL {
            for y01 in [false, true] {
                for y11 in [false, true] {
                    let w = bern(model.p_d(), d.is_minority())
                        * model.pi(s)
                        * bern(model.mu_01(), y01)
                        * bern(model.mu_11(), y11);
                    if w > 0.0 {
                        cells.push((Encounter::new(d, s, y01, y11), w));
                    }
                }
            }
        }
    }
    cells
}

/// Estimate with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub se: f64,
}

/// Brute-force estimands; `None` marks a field whose conditioning event or
/// denominator is empty in the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub n: usize,
    pub n_detained: usize,
    pub ate: Option<OracleValue>,
    pub att: Option<OracleValue>,
    pub ate_m1: Option<OracleValue>,
    pub att_m1: Option<OracleValue>,
    pub pie: Option<OracleValue>,
    pub pde: Option<OracleValue>,
    /// `mean(Y(1)) / mean(Y(0))` over all rows' potential outcomes.
    pub crr: Option<OracleValue>,
    /// `mean(y | d=1) / mean(y | d=0)` over all encounters, detained or not.
    pub crr_by_race: Option<OracleValue>,
    pub naive_rr: Option<OracleValue>,
    pub naive_rd: Option<OracleValue>,
    /// `P̂(D = 1)` among encounters.
    pub encounter_share: Option<f64>,
    /// `P̂(D = 1 | M = 1)`.
    pub detained_share: Option<f64>,
}

impl OracleReport {
    /// Named fields in a fixed order, for reports.
    pub fn fields(&self) -> [(&'static str, Option<OracleValue>); 10] {
        [
            ("ATE", self.ate),
            ("ATT", self.att),
            ("ATE_M1", self.ate_m1),
            ("ATT_M1", self.att_m1),
            ("PIE", self.pie),
            ("PDE", self.pde),
            ("CRR", self.crr),
            ("CRR_by_race", self.crr_by_race),
            ("naive_RR", self.naive_rr),
            ("naive_RD", self.naive_rd),
        ]
    }
}

/// Weighted first and second moments of one variable.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    w: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn add(&mut self, x: f64, w: f64) {
        self.w += w;
        self.sum += w * x;
        self.sum_sq += w * x * x;
    }

    fn mean(&self) -> Option<f64> {
        (self.w > 0.0).then(|| self.sum / self.w)
    }

    /// Plug-in variance of one observation.
    fn var(&self) -> f64 {
        let m = self.sum / self.w;
        (self.sum_sq / self.w - m * m).max(0.0)
    }

    fn estimate(&self, sampled: bool) -> Option<OracleValue> {
        let value = self.mean()?;
        let se = if sampled { (self.var() / self.w).sqrt() } else { 0.0 };
        Some(OracleValue { value, se })
    }
}

/// Ratio of two independent group means, delta-method SE.
fn independent_ratio(num: &Moments, den: &Moments, sampled: bool) -> Option<OracleValue> {
    let (a, b) = (num.mean()?, den.mean()?);
    if b <= 0.0 {
        return None;
    }
    let value = a / b;
    let se = if sampled {
        (num.var() / (num.w * b * b) + a * a * den.var() / (den.w * b.powi(4))).sqrt()
    } else {
        0.0
    };
    Some(OracleValue { value, se })
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    all: f64,
    detained: f64,
    minority: f64,
    detained_minority: f64,
    ate: Moments,
    att: Moments,
    ate_m1: Moments,
    att_m1: Moments,
    pie: Moments,
    pde: Moments,
    y1: Moments,
    y0: Moments,
    y1_y0: f64,
    obs_minority: Moments,
    obs_majority: Moments,
    naive_minority: Moments,
    naive_majority: Moments,
}

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

impl Accumulator {
    fn add(&mut self, e: &Encounter, w: f64) {
        let y1 = ind(e.y1());
        let y0 = ind(e.y0());
        let effect = y1 - y0;
        self.all += w;
        self.ate.add(effect, w);
        self.pie.add(ind(e.y11) * (ind(e.m1) - ind(e.m0)), w);
        self.pde.add((ind(e.y11) - ind(e.y01)) * ind(e.m0), w);
        self.y1.add(y1, w);
        self.y0.add(y0, w);
        self.y1_y0 += w * y1 * y0;
        if e.d.is_minority() {
            self.minority += w;
            self.att.add(effect, w);
            self.obs_minority.add(ind(e.y), w);
        } else {
            self.obs_majority.add(ind(e.y), w);
        }
        if e.m {
            self.detained += w;
            self.ate_m1.add(effect, w);
            if e.d.is_minority() {
                self.detained_minority += w;
                self.att_m1.add(effect, w);
                self.naive_minority.add(ind(e.y), w);
            } else {
                self.naive_majority.add(ind(e.y), w);
            }
        }
    }

    /// Ratio of two means over the same rows, delta-method SE with covariance.
    fn paired_crr(&self, sampled: bool) -> Option<OracleValue> {
        let (a, b) = (self.y1.mean()?, self.y0.mean()?);
        if b <= 0.0 {
            return None;
        }
        let value = a / b;
        let se = if sampled {
            let n = self.all;
            let cov = self.y1_y0 / n - a * b;
            let var = self.y1.var() / (b * b) - 2.0 * a * cov / b.powi(3) + a * a * self.y0.var() / b.powi(4);
            (var.max(0.0) / n).sqrt()
        } else {
            0.0
        };
        Some(OracleValue { value, se })
    }

    fn report(&self, n: usize, sampled: bool) -> OracleReport {
        let naive_rd = match (self.naive_minority.mean(), self.naive_majority.mean()) {
            (Some(a), Some(b)) => Some(OracleValue {
                value: a - b,
                se: if sampled {
                    (self.naive_minority.var() / self.naive_minority.w + self.naive_majority.var() / self.naive_majority.w)
                        .sqrt()
                } else {
                    0.0
                },
            }),
            _ => None,
        };
        OracleReport {
            n,
            n_detained: self.detained.round() as usize,
            ate: self.ate.estimate(sampled),
            att: self.att.estimate(sampled),
            ate_m1: self.ate_m1.estimate(sampled),
            att_m1: self.att_m1.estimate(sampled),
            pie: self.pie.estimate(sampled),
            pde: self.pde.estimate(sampled),
            crr: self.paired_crr(sampled),
            crr_by_race: independent_ratio(&self.obs_minority, &self.obs_majority, sampled),
            naive_rr: independent_ratio(&self.naive_minority, &self.naive_majority, sampled),
            naive_rd,
            encounter_share: (self.all > 0.0).then(|| self.minority / self.all),
            detained_share: (self.detained > 0.0).then(|| self.detained_minority / self.detained),
        }
    }
}

/// Every estimand by direct averaging over the table.
pub fn oracle_estimands(table: &EncounterTable) -> OracleReport {
    let mut acc = Accumulator::default();
    for row in &table.rows {
        acc.add(row, 1.0);
    }
    let mut report = acc.report(table.rows.len(), true);
    report.n_detained = table.rows.iter().filter(|r| r.m).count();
    report
}

/// Exact estimands by summing over [`enumerate_population`]; standard
/// errors are zero.
pub fn population_estimands(model: &PopulationModel) -> OracleReport {
    let mut acc = Accumulator::default();
    for (row, w) in enumerate_population(model) {
        acc.add(&row, w);
    }
    acc.report(0, false)
}

/// Writes the table as comma-separated text with header
/// `d,s,m0,m1,y01,y11,m,y,x`.
pub fn write_encounters<W: Write>(table: &EncounterTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["d", "s", "m0", "m1", "y01", "y11", "m", "y", "x"])?;
    let b = |v: bool| if v { "1" } else { "0" };
    for r in &table.rows {
        w.write_record([
            if r.d.is_minority() { "1" } else { "0" },
            r.s.code(),
            b(r.m0),
            b(r.m1),
            b(r.y01),
            b(r.y11),
            b(r.m),
            b(r.y),
            table.stratum.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> PopulationModel {
        PopulationModel::new(0.5, [0.2, 0.1, 0.0, 0.7], 0.1, 0.2).unwrap()
    }

    #[test]
    fn never_stopped_population() {
        let m = PopulationModel::new(0.4, [0.0, 0.0, 0.0, 1.0], 0.5, 0.5).unwrap();
        let t = sample_encounters(&m, 5_000, 1).unwrap();
        assert!(t.rows.iter().all(|r| !r.m && !r.y));
        assert!(to_administrative(&t).is_empty());
        let report = oracle_estimands(&t);
        assert!(report.ate_m1.is_none() && report.naive_rr.is_none() && report.crr.is_none());
    }

    #[test]
    fn always_stopped_always_force() {
        let m = PopulationModel::new(0.4, [1.0, 0.0, 0.0, 0.0], 1.0, 1.0).unwrap();
        let t = sample_encounters(&m, 2_000, 2).unwrap();
        assert!(t.rows.iter().all(|r| r.m && r.y));
    }

    #[test]
    fn encounter_invariants_hold() {
        let t = sample_encounters(&toy(), 100_000, 3).unwrap();
        for r in &t.rows {
            assert_eq!((r.m0, r.m1), r.s.potential_stops());
            assert_eq!(r.m, if r.d.is_minority() { r.m1 } else { r.m0 });
            assert!(r.m || !r.y);
            if r.m {
                assert_eq!(r.y, if r.d.is_minority() { r.y11 } else { r.y01 });
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_sharded() {
        let a = sample_encounters(&toy(), SHARD_SIZE + 17, 11).unwrap();
        let b = sample_encounters(&toy(), SHARD_SIZE + 17, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), SHARD_SIZE + 17);
        // The first shard is a prefix of any longer draw.
        let short = sample_encounters(&toy(), 100, 11).unwrap();
        assert_eq!(short.rows[..], a.rows[..100]);
        assert_eq!(oracle_estimands(&a), oracle_estimands(&b));
        assert!(sample_encounters(&toy(), 0, 1).is_err());
    }

    #[test]
    fn administrative_projection_keeps_order() {
        let t = sample_encounters_in(&toy(), 1_000, 4, "p7").unwrap();
        let admin = to_administrative(&t);
        let expected: Vec<_> = t.rows.iter().filter(|r| r.m).map(|r| (r.d, r.y)).collect();
        assert_eq!(admin.records_in("p7").unwrap(), expected);
    }

    #[test]
    fn toy_model_oracle_near_closed_form() {
        let t = sample_encounters(&toy(), 1_000_000, 5).unwrap();
        let r = oracle_estimands(&t);
        let within = |v: OracleValue, target: f64| (v.value - target).abs() <= 3.0 * v.se;
        assert!(within(r.crr.unwrap(), 3.0), "{:?}", r.crr);
        assert!(within(r.naive_rr.unwrap(), 2.0), "{:?}", r.naive_rr);
        let frac = r.n_detained as f64 / r.n as f64;
        let se = (0.25f64 * 0.75 / r.n as f64).sqrt();
        assert!((frac - 0.25).abs() <= 3.0 * se, "{frac}");
    }

    #[test]
    fn degenerate_prevalence_leaves_att_undefined() {
        let m = PopulationModel::new(0.0, [0.3, 0.2, 0.1, 0.4], 0.2, 0.3).unwrap();
        let r = oracle_estimands(&sample_encounters(&m, 10_000, 6).unwrap());
        assert!(r.att.is_none() && r.att_m1.is_none() && r.naive_rr.is_none());
        assert!(r.ate.is_some() && r.ate_m1.is_some());
    }

    #[test]
    fn population_cells_sum_to_one() {
        let total: f64 = enumerate_population(&toy()).iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encounter_export_has_header() {
        let t = sample_encounters(&toy(), 3, 7).unwrap();
        let mut buf = Vec::new();
        write_encounters(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "d,s,m0,m1,y01,y11,m,y,x");
        assert_eq!(text.lines().count(), 4);
    }
}
