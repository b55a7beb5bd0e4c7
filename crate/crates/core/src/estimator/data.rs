use std::collections::{BTreeMap, HashMap};

use crate::model::Race;

use super::EstimateError;

/// Stratum key used when no covariate stratification is requested. External
/// distributions keyed by it apply to every stratum that has no entry of its
/// own.
pub const POOLED_STRATUM: &str = "ALL";

/// One detained civilian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdminRecord {
    pub d: Race,
    pub y: bool,
    stratum: u32,
}

/// Records of detained (`M = 1`) encounters.
///
/// Stratum keys are interned in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdministrativeDataset {
    keys: Vec<String>,
    index: HashMap<String, u32>,
    rows: Vec<AdminRecord>,
}

impl AdministrativeDataset {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, key: &str) -> u32 {
        if let Some(&id) = self.index.get(key) {
            return id;
        }
        let id = u32::try_from(self.keys.len()).expect("fewer than 2^32 strata");
        self.keys.push(key.to_owned());
        self.index.insert(key.to_owned(), id);
        id
    }

    pub fn push(&mut self, d: Race, y: bool, stratum: &str) {
        let stratum = self.intern(stratum);
        self.rows.push(AdminRecord { d, y, stratum });
    }

    pub fn extend_from(&mut self, other: &AdministrativeDataset) {
        for row in &other.rows {
            self.push(row.d, row.y, other.stratum_of(row));
        }
    }

    /// Same rows, all in the pooled stratum.
    pub fn pooled(&self) -> AdministrativeDataset {
        let mut out = AdministrativeDataset::new();
        for row in &self.rows {
            out.push(row.d, row.y, POOLED_STRATUM);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[AdminRecord] {
        &self.rows
    }

    pub fn stratum_of(&self, row: &AdminRecord) -> &str {
        &self.keys[row.stratum as usize]
    }

    /// Stratum keys in first-appearance order.
    pub fn stratum_keys(&self) -> &[String] {
        &self.keys
    }

    pub fn contains_stratum(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    /// `(d, y)` pairs of the rows in stratum `key`, in row order.
    pub fn records_in(&self, key: &str) -> Option<Vec<(Race, bool)>> {
        let id = *self.index.get(key)?;
        Some(self.rows.iter().filter(|r| r.stratum == id).map(|r| (r.d, r.y)).collect())
    }

    pub fn counts_in(&self, key: &str) -> Option<AdminCounts> {
        self.records_in(key).map(|rows| AdminCounts::from_records(rows.iter().copied()))
    }
}

/// Race-by-force cell counts of detained civilians in one stratum.
///
/// Stored as reals so the +0.5 cell correction can be represented.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdminCounts {
    pub minority: f64,
    pub majority: f64,
    pub force_minority: f64,
    pub force_majority: f64,
}

impl AdminCounts {
    pub fn from_records(records: impl IntoIterator<Item = (Race, bool)>) -> Self {
        let mut c = AdminCounts::default();
        for (d, y) in records {
            let force = if y { 1.0 } else { 0.0 };
            match d {
                Race::Minority => {
                    c.minority += 1.0;
                    c.force_minority += force;
                }
                Race::Majority => {
                    c.majority += 1.0;
                    c.force_majority += force;
                }
            }
        }
        c
    }

    /// Haldane-Anscombe correction: +0.5 in each of the four race × force cells.
    pub fn with_haldane(self) -> Self {
        AdminCounts {
            minority: self.minority + 1.0,
            majority: self.majority + 1.0,
            force_minority: self.force_minority + 0.5,
            force_majority: self.force_majority + 0.5,
        }
    }

    pub fn total(&self) -> f64 {
        self.minority + self.majority
    }

    pub fn force_rate(&self, d: Race) -> Option<f64> {
        let (n, f) = match d {
            Race::Minority => (self.minority, self.force_minority),
            Race::Majority => (self.majority, self.force_majority),
        };
        (n > 0.0).then(|| f / n)
    }

    /// `P̂(D = 1 | M = 1)`
    pub fn minority_share(&self) -> Option<f64> {
        let total = self.total();
        (total > 0.0).then(|| self.minority / total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExternalKind {
    /// Residential counts; treated as known, never resampled.
    CensusFixed,
    /// Survey microdata; respondents are resampled in the bootstrap.
    SurveyResampled,
}

impl ExternalKind {
    pub fn name(self) -> &'static str {
        match self {
            ExternalKind::CensusFixed => "census-fixed",
            ExternalKind::SurveyResampled => "survey-resampled",
        }
    }
}

/// Survey respondent retained for resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Respondent {
    pub d: Race,
    pub stratum: String,
    pub weight: f64,
}

/// `p1' = lambda · p1 + (1 - lambda) · citywide_p1`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixture {
    pub lambda: f64,
    pub citywide_p1: f64,
}

impl Mixture {
    fn apply(&self, p1: Option<f64>) -> Option<f64> {
        if self.lambda == 0.0 {
            return Some(self.citywide_p1);
        }
        p1.map(|p| self.lambda * p + (1.0 - self.lambda) * self.citywide_p1)
    }
}

/// Per-stratum minority share among encounters, `P(D = 1 | X = x)`, taken
/// from a source other than the administrative records.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalRaceDistribution {
    kind: ExternalKind,
    shares: BTreeMap<String, Option<f64>>,
    respondents: Vec<Respondent>,
    mixtures: Vec<Mixture>,
}

fn check_share(key: &str, p: f64) -> Result<(), EstimateError> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(EstimateError::InvalidParameter(format!("share {p} for stratum `{key}` is not a probability")))
    }
}

/// Weighted minority share, `None` when the total weight is zero.
pub(crate) fn weighted_share(rows: impl IntoIterator<Item = (Race, f64)>) -> Option<f64> {
    let (mut minority, mut total) = (0.0, 0.0);
    for (d, w) in rows {
        total += w;
        if d.is_minority() {
            minority += w;
        }
    }
    (total > 0.0).then(|| minority / total)
}

impl ExternalRaceDistribution {
    /// Fixed shares; `None` marks a stratum whose share is undefined
    /// (for example a zero-population census tract).
    pub fn census<K: Into<String>>(
        shares: impl IntoIterator<Item = (K, Option<f64>)>,
    ) -> Result<Self, EstimateError> {
        let mut map = BTreeMap::new();
        for (key, share) in shares {
            let key = key.into();
            if let Some(p) = share {
                check_share(&key, p)?;
            }
            map.insert(key, share);
        }
        Ok(ExternalRaceDistribution {
            kind: ExternalKind::CensusFixed,
            shares: map,
            respondents: Vec::new(),
            mixtures: Vec::new(),
        })
    }

    /// A single fixed share for one stratum.
    pub fn fixed(stratum: &str, p1: f64) -> Result<Self, EstimateError> {
        Self::census([(stratum, Some(p1))])
    }

    pub fn survey(respondents: Vec<Respondent>) -> Result<Self, EstimateError> {
        let mut grouped: BTreeMap<String, Vec<(Race, f64)>> = BTreeMap::new();
        for r in &respondents {
            if !(r.weight.is_finite() && r.weight >= 0.0) {
                return Err(EstimateError::InvalidParameter(format!(
                    "respondent weight {} is not finite and nonnegative",
                    r.weight
                )));
            }
            grouped.entry(r.stratum.clone()).or_default().push((r.d, r.weight));
        }
        let shares = grouped.into_iter().map(|(k, rows)| (k, weighted_share(rows))).collect();
        Ok(ExternalRaceDistribution {
            kind: ExternalKind::SurveyResampled,
            shares,
            respondents,
            mixtures: Vec::new(),
        })
    }

    pub fn kind(&self) -> ExternalKind {
        self.kind
    }

    pub fn mixtures(&self) -> &[Mixture] {
        &self.mixtures
    }

    pub fn strata(&self) -> impl Iterator<Item = &str> {
        self.shares.keys().map(String::as_str)
    }

    /// The key whose share applies to stratum `x`: `x` itself, else the
    /// pooled key.
    pub fn resolve_key<'a>(&'a self, x: &str) -> Option<&'a str> {
        self.shares
            .get_key_value(x)
            .or_else(|| self.shares.get_key_value(POOLED_STRATUM))
            .map(|(k, _)| k.as_str())
    }

    /// Unmixed share as stored.
    pub fn base_share(&self, x: &str) -> Option<Option<f64>> {
        self.resolve_key(x).map(|k| self.shares[k])
    }

    pub(crate) fn mix(&self, p1: Option<f64>) -> Option<f64> {
        self.mixtures.iter().fold(p1, |p, m| m.apply(p))
    }

    /// Share for stratum `x` after any sensitivity mixtures.
    pub fn p1(&self, x: &str) -> Result<f64, EstimateError> {
        let base = self
            .base_share(x)
            .ok_or_else(|| EstimateError::MissingExternal(x.to_owned()))?;
        self.mix(base).ok_or_else(|| EstimateError::UndefinedExternal(x.to_owned()))
    }

    /// Respondents behind the share used for stratum `x`.
    pub fn respondents_for(&self, x: &str) -> Vec<(Race, f64)> {
        match self.resolve_key(x) {
            Some(key) => self
                .respondents
                .iter()
                .filter(|r| r.stratum == key)
                .map(|r| (r.d, r.weight))
                .collect(),
            None => Vec::new(),
        }
    }

    pub(crate) fn push_mixture(&mut self, mixture: Mixture) {
        self.mixtures.push(mixture);
    }
}
