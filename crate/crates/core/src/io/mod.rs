//! Loading administrative records, census counts and survey microdata.
//!
//! All inputs are comma-separated text with a header row. Column names,
//! the race mapping and the stratum key construction come from a
//! [`DataConfig`]. Every loader returns a [`LoadReport`] accounting for
//! each physical data row: `loaded + dropped + unparseable = rows`.

mod admin;
mod census;
mod config;
mod survey;

use std::path::PathBuf;

use thiserror::Error;

pub use admin::{load_administrative, read_administrative, write_administrative};
pub use census::{load_census, read_census, write_census, CensusData};
pub use config::{stratum_key, AdminColumns, CensusColumns, DataConfig, SurveyColumns, STRATUM_KEY_SEPARATOR};
pub use survey::{derive_survey_distribution, load_survey, read_survey, SurveyMode, SurveyRespondentRow, MAX_CONTACTS};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {reason}")]
    UnparseableRow { line: u64, reason: String },
    #[error("line {line}: negative count in column `{column}`")]
    NegativeCount { line: u64, column: String },
    #[error("survey mode `{0}` selects no respondents")]
    EmptySubset(SurveyMode),
    #[error("configuration: {0}")]
    Config(String),
}

/// Row accounting for one loaded file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub loaded: usize,
    /// Rows whose race is not in the race map.
    pub dropped: usize,
    pub unparseable: usize,
    pub unparseable_lines: Vec<u64>,
}

impl LoadReport {
    pub fn rows(&self) -> usize {
        self.loaded + self.dropped + self.unparseable
    }
}

pub(crate) fn open(path: &std::path::Path) -> Result<std::fs::File, IoError> {
    std::fs::File::open(path).map_err(|source| IoError::File { path: path.to_owned(), source })
}

/// Column positions looked up from the header.
pub(crate) fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, IoError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| IoError::MissingColumn(name.to_owned()))
}

pub(crate) fn reader<R: std::io::Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(input)
}

/// `1/0`, `true/false`, `yes/no`, `y/n`, case-insensitive.
pub(crate) fn parse_flag(raw: &str) -> Option<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Some(true),
        "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

/// Empty, `NA` and `.` cells are missing.
pub(crate) fn is_missing(raw: &str) -> bool {
    matches!(raw.trim(), "" | "NA" | "na" | ".")
}

/// Records an unparseable row, or fails when `strict`.
pub(crate) fn reject(report: &mut LoadReport, strict: bool, line: u64, reason: String) -> Result<(), IoError> {
    if strict {
        return Err(IoError::UnparseableRow { line, reason });
    }
    report.unparseable += 1;
    report.unparseable_lines.push(line);
    Ok(())
}
