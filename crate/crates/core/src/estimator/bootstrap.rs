use rand::Rng;
use rayon::prelude::*;

use crate::model::Race;
use crate::rng::stream_rng;

use super::{
    weighted_share, AdminCounts, AdministrativeDataset, EstimateError, Estimator, ExternalKind,
    ExternalRaceDistribution,
};

pub const DEFAULT_REPLICATES: usize = 1000;
pub const DEFAULT_LEVEL: f64 = 0.95;
pub const DEFAULT_SEED: u64 = 20_220_314;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    /// Apply the +0.5 cell correction to administrative counts.
    pub haldane: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: DEFAULT_REPLICATES,
            level: DEFAULT_LEVEL,
            seed: DEFAULT_SEED,
            haldane: false,
        }
    }
}

/// Point estimate with a percentile bootstrap interval.
///
/// `lo <= hi` always holds; `point` may fall outside `[lo, hi]` for small,
/// skewed samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub replicates: usize,
    pub seed: u64,
    pub undefined_replicates: usize,
}

/// Linearly interpolated quantile of sorted data (R type 7).
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

enum ExternalScope {
    None,
    Fixed(f64),
    Resampled(Vec<(Race, f64)>),
}

/// Nonparametric percentile bootstrap of `estimator` in stratum `x`.
///
/// Administrative rows of the stratum are resampled with replacement.
/// Survey respondents behind the stratum's external share are resampled
/// as well; census shares are held fixed. Replicate `b` draws from stream
/// `b` of `config.seed`, so the interval does not depend on thread count.
pub fn bootstrap(
    estimator: Estimator,
    data: &AdministrativeDataset,
    external: Option<&ExternalRaceDistribution>,
    x: &str,
    config: &BootstrapConfig,
) -> Result<EstimateWithCI, EstimateError> {
    if config.replicates < 2 {
        return Err(EstimateError::InvalidParameter(format!(
            "bootstrap needs at least 2 replicates, got {}",
            config.replicates
        )));
    }
    if !(config.level > 0.0 && config.level < 1.0) {
        return Err(EstimateError::InvalidParameter(format!("level {} not in (0, 1)", config.level)));
    }
    let records = data.records_in(x).ok_or_else(|| EstimateError::UnknownStratum(x.to_owned()))?;
    if records.is_empty() {
        return Err(EstimateError::UnknownStratum(x.to_owned()));
    }

    let scope = if estimator.needs_external() {
        let ext = external.ok_or_else(|| EstimateError::MissingExternal(x.to_owned()))?;
        match ext.kind() {
            ExternalKind::CensusFixed => ExternalScope::Fixed(ext.p1(x)?),
            ExternalKind::SurveyResampled => {
                // Validates that the share exists before resampling.
                ext.p1(x)?;
                ExternalScope::Resampled(ext.respondents_for(x))
            }
        }
    } else {
        ExternalScope::None
    };
    let mix = |p: Option<f64>| external.and_then(|e| e.mix(p));

    let adjust = |c: AdminCounts| if config.haldane { c.with_haldane() } else { c };
    let point_p1 = match &scope {
        ExternalScope::None => None,
        ExternalScope::Fixed(p) => Some(*p),
        ExternalScope::Resampled(_) => Some(external.expect("checked above").p1(x)?),
    };
    let point = estimator.on_counts(&adjust(AdminCounts::from_records(records.iter().copied())), point_p1)?;

    let n = records.len();
    let results: Vec<Result<f64, EstimateError>> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(config.seed, b);
            let counts = AdminCounts::from_records((0..n).map(|_| records[rng.random_range(0..n)]));
            let p1 = match &scope {
                ExternalScope::None => None,
                ExternalScope::Fixed(p) => Some(*p),
                ExternalScope::Resampled(rows) => {
                    let m = rows.len();
                    let share = if m == 0 {
                        None
                    } else {
                        weighted_share((0..m).map(|_| rows[rng.random_range(0..m)]))
                    };
                    Some(mix(share).ok_or_else(|| EstimateError::UndefinedExternal(x.to_owned()))?)
                }
            };
            estimator.on_counts(&adjust(counts), p1)
        })
        .collect();

    let mut values: Vec<f64> = results.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let undefined = config.replicates - values.len();
    if 2 * undefined > config.replicates {
        return Err(EstimateError::TooManyUndefined { undefined, replicates: config.replicates });
    }
    values.sort_by(f64::total_cmp);
    let alpha = 1.0 - config.level;
    Ok(EstimateWithCI {
        point,
        lo: percentile(&values, alpha / 2.0),
        hi: percentile(&values, 1.0 - alpha / 2.0),
        level: config.level,
        replicates: config.replicates,
        seed: config.seed,
        undefined_replicates: undefined,
    })
}
