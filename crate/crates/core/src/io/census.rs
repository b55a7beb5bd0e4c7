use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::estimator::ExternalRaceDistribution;

use super::{column_index, open, reader, reject, stratum_key, DataConfig, IoError, LoadReport};

/// Residential counts by stratum, as a fixed external distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusData {
    pub distribution: ExternalRaceDistribution,
    /// `(minority, majority)` counts per stratum.
    pub counts: BTreeMap<String, (f64, f64)>,
    pub report: LoadReport,
}

impl CensusData {
    /// Minority share over all strata combined.
    pub fn overall_share(&self) -> Option<f64> {
        let (d1, d0) = self.counts.values().fold((0.0, 0.0), |(a, b), (c1, c0)| (a + c1, b + c0));
        (d1 + d0 > 0.0).then(|| d1 / (d1 + d0))
    }

    /// Strata whose share is undefined because nobody lives there.
    pub fn undefined_strata(&self) -> Vec<&str> {
        self.counts
            .iter()
            .filter(|(_, (d1, d0))| d1 + d0 <= 0.0)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

pub fn load_census(path: &Path, config: &DataConfig) -> Result<CensusData, IoError> {
    read_census(open(path)?, config)
}

/// Rows sharing a stratum key are summed, so block-level counts aggregate
/// into their stratum.
pub fn read_census<R: Read>(input: R, config: &DataConfig) -> Result<CensusData, IoError> {
    let cols = &config.census;
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let strata_cols =
        cols.strata.iter().map(|c| column_index(&headers, c)).collect::<Result<Vec<_>, _>>()?;
    let d1_col = column_index(&headers, &cols.count_d1)?;
    let d0_col = column_index(&headers, &cols.count_d0)?;

    let mut counts: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    let mut report = LoadReport::default();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let strata = strata_cols.iter().map(|&i| record.get(i)).collect::<Option<Vec<_>>>();
        let (Some(strata), Some(raw1), Some(raw0)) = (strata, record.get(d1_col), record.get(d0_col)) else {
            reject(&mut report, config.strict, line, "row has too few fields".into())?;
            continue;
        };
        let parse = |raw: &str, column: &str| -> Result<Option<f64>, IoError> {
            match raw.trim().parse::<f64>() {
                Ok(v) if v.is_finite() && v < 0.0 => {
                    Err(IoError::NegativeCount { line, column: column.to_owned() })
                }
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => Ok(None),
            }
        };
        let (Some(c1), Some(c0)) = (parse(raw1, &cols.count_d1)?, parse(raw0, &cols.count_d0)?) else {
            reject(&mut report, config.strict, line, "count is not a number".into())?;
            continue;
        };
        let entry = counts.entry(stratum_key(strata)).or_default();
        entry.0 += c1;
        entry.1 += c0;
        report.loaded += 1;
    }
    let distribution = ExternalRaceDistribution::census(
        counts.iter().map(|(k, &(c1, c0))| (k.clone(), (c1 + c0 > 0.0).then(|| c1 / (c1 + c0)))),
    )
    .expect("count shares lie in [0, 1]");
    Ok(CensusData { distribution, counts, report })
}

/// Writes `stratum,count_d1,count_d0` rows.
pub fn write_census<W: Write>(counts: &[(String, u64, u64)], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["stratum", "count_d1", "count_d0"])?;
    for (key, d1, d0) in counts {
        w.write_record([key.as_str(), &d1.to_string(), &d0.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
