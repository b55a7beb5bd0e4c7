use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use crate::estimator::{ExternalRaceDistribution, Respondent};
use crate::model::Race;

use super::{column_index, is_missing, open, parse_flag, reader, reject, stratum_key, DataConfig, IoError, LoadReport};

/// Respondents reporting more contacts than this are outliers and left out
/// of the contact-weighted modes.
pub const MAX_CONTACTS: u32 = 30;

/// One survey respondent. `None` marks a missing item; a respondent is
/// excluded from every mode that reads a missing item.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRespondentRow {
    pub race: Race,
    pub stratum: String,
    pub stop_public: Option<bool>,
    pub stop_vehicle: Option<bool>,
    pub stop_other: Option<bool>,
    pub contacts: Option<u32>,
    pub large_metro: Option<bool>,
    /// Respondent weight for the unweighted modes (1 without a weight column).
    pub weight: Option<f64>,
}

/// Which respondents count as police encounters, and how they are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurveyMode {
    All,
    /// Stopped while driving.
    MvStop,
    /// Stopped in a public place or for another reason.
    StopInPublic,
    LargeMetro,
    /// Weighted by the number of contacts.
    Weighted,
    WeightedLargeMetro,
}

impl SurveyMode {
    pub const ALL: [SurveyMode; 6] = [
        SurveyMode::All,
        SurveyMode::MvStop,
        SurveyMode::StopInPublic,
        SurveyMode::LargeMetro,
        SurveyMode::Weighted,
        SurveyMode::WeightedLargeMetro,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SurveyMode::All => "all",
            SurveyMode::MvStop => "mv-stop",
            SurveyMode::StopInPublic => "stop-in-public",
            SurveyMode::LargeMetro => "large-metro",
            SurveyMode::Weighted => "weighted",
            SurveyMode::WeightedLargeMetro => "weighted-large-metro",
        }
    }

    /// Weight of `row` under this mode, `None` when the row is not selected.
    pub fn weight_of(self, row: &SurveyRespondentRow) -> Option<f64> {
        let by_contacts = || row.contacts.filter(|&c| c <= MAX_CONTACTS).map(f64::from);
        let selected = match self {
            SurveyMode::All | SurveyMode::Weighted => true,
            SurveyMode::MvStop => row.stop_vehicle?,
            SurveyMode::StopInPublic => row.stop_public? | row.stop_other?,
            SurveyMode::LargeMetro | SurveyMode::WeightedLargeMetro => row.large_metro?,
        };
        if !selected {
            return None;
        }
        match self {
            SurveyMode::Weighted | SurveyMode::WeightedLargeMetro => by_contacts(),
            _ => row.weight,
        }
    }
}

impl fmt::Display for SurveyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurveyMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SurveyMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown survey mode `{s}`"))
    }
}

/// Minority share among the respondents selected by `mode`, per stratum.
pub fn derive_survey_distribution(
    rows: &[SurveyRespondentRow],
    mode: SurveyMode,
) -> Result<ExternalRaceDistribution, IoError> {
    let respondents: Vec<Respondent> = rows
        .iter()
        .filter_map(|row| {
            mode.weight_of(row).map(|weight| Respondent { d: row.race, stratum: row.stratum.clone(), weight })
        })
        .collect();
    if respondents.iter().all(|r| r.weight <= 0.0) {
        return Err(IoError::EmptySubset(mode));
    }
    ExternalRaceDistribution::survey(respondents).map_err(|e| IoError::Config(e.to_string()))
}

pub fn load_survey(path: &Path, config: &DataConfig) -> Result<(Vec<SurveyRespondentRow>, LoadReport), IoError> {
    read_survey(open(path)?, config)
}

/// Reads survey microdata. Missing items (`""`, `NA`, `.`) are kept as
/// `None`; values that are present but malformed make the row unparseable.
pub fn read_survey<R: Read>(input: R, config: &DataConfig) -> Result<(Vec<SurveyRespondentRow>, LoadReport), IoError> {
    let cols = &config.survey;
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    // Item columns absent from the file are missing for every respondent;
    // modes that need them then select nobody.
    let find = |name: &Option<String>| name.as_deref().and_then(|n| column_index(&headers, n).ok());
    let race_col = column_index(&headers, &cols.race)?;
    let strata_cols = cols.strata.iter().map(|c| column_index(&headers, c)).collect::<Result<Vec<_>, _>>()?;
    let public_col = find(&cols.stop_public);
    let vehicle_col = find(&cols.stop_vehicle);
    let other_col = find(&cols.stop_other);
    let contacts_col = find(&cols.contacts);
    let metro_col = find(&cols.large_metro);
    let weight_col = cols.weight.as_deref().map(|n| column_index(&headers, n)).transpose()?;

    let mut rows = Vec::new();
    let mut report = LoadReport::default();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let parsed = (|| -> Result<Option<SurveyRespondentRow>, String> {
            let cell = |i: usize| record.get(i).ok_or_else(|| "row has too few fields".to_owned());
            let item = |col: Option<usize>| -> Result<Option<&str>, String> {
                match col {
                    None => Ok(None),
                    Some(i) => cell(i).map(|raw| (!is_missing(raw)).then_some(raw)),
                }
            };
            let flag = |col: Option<usize>| -> Result<Option<bool>, String> {
                item(col)?
                    .map(|raw| parse_flag(raw).ok_or_else(|| format!("`{raw}` is not 0/1")))
                    .transpose()
            };
            let race = cell(race_col)?;
            let strata = strata_cols.iter().map(|&i| cell(i)).collect::<Result<Vec<_>, _>>()?;
            let contacts = item(contacts_col)?
                .map(|raw| raw.parse::<u32>().map_err(|_| format!("contacts `{raw}` is not a nonnegative integer")))
                .transpose()?;
            let weight = match weight_col {
                None => Some(1.0),
                Some(_) => item(weight_col)?
                    .map(|raw| match raw.parse::<f64>() {
                        Ok(w) if w.is_finite() && w >= 0.0 => Ok(w),
                        _ => Err(format!("weight `{raw}` is not a nonnegative number")),
                    })
                    .transpose()?,
            };
            let row = SurveyRespondentRow {
                race: Race::Minority,
                stratum: stratum_key(strata),
                stop_public: flag(public_col)?,
                stop_vehicle: flag(vehicle_col)?,
                stop_other: flag(other_col)?,
                contacts,
                large_metro: flag(metro_col)?,
                weight,
            };
            Ok(config.map_race(race).map(|race| SurveyRespondentRow { race, ..row }))
        })();
        match parsed {
            Ok(Some(row)) => {
                rows.push(row);
                report.loaded += 1;
            }
            Ok(None) => report.dropped += 1,
            Err(reason) => reject(&mut report, config.strict, line, reason)?,
        }
    }
    Ok((rows, report))
}
