use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::estimator::POOLED_STRATUM;
use crate::model::Race;

/// Separator between column values in a composite stratum key.
pub const STRATUM_KEY_SEPARATOR: &str = "|";

/// Column mapping for the three input tables.
///
/// The defaults describe the files written by the `simulate` command:
/// race coded `0`/`1`, no stratum columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Raw race value → race indicator. Values not listed are dropped.
    pub race_map: BTreeMap<String, u8>,
    /// Fail on the first unparseable row instead of counting and skipping it.
    pub strict: bool,
    pub admin: AdminColumns,
    pub census: CensusColumns,
    pub survey: SurveyColumns,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            race_map: BTreeMap::from([("0".to_owned(), 0), ("1".to_owned(), 1)]),
            strict: true,
            admin: AdminColumns::default(),
            census: CensusColumns::default(),
            survey: SurveyColumns::default(),
        }
    }
}

impl DataConfig {
    pub fn map_race(&self, raw: &str) -> Option<Race> {
        self.race_map.get(raw.trim()).copied().and_then(Race::from_indicator)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdminColumns {
    pub race: String,
    pub force: String,
    /// Columns combined into the stratum key; empty means one pooled stratum.
    pub strata: Vec<String>,
}

impl Default for AdminColumns {
    fn default() -> Self {
        AdminColumns { race: "race".into(), force: "force".into(), strata: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusColumns {
    pub strata: Vec<String>,
    pub count_d1: String,
    pub count_d0: String,
}

impl Default for CensusColumns {
    fn default() -> Self {
        CensusColumns { strata: vec!["stratum".into()], count_d1: "count_d1".into(), count_d0: "count_d0".into() }
    }
}

/// Survey microdata columns. An item set to `null` is treated as missing for
/// every respondent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurveyColumns {
    pub race: String,
    /// Stopped in a public place (V11).
    pub stop_public: Option<String>,
    /// Stopped while driving (V13).
    pub stop_vehicle: Option<String>,
    /// Stopped for another reason (V21).
    pub stop_other: Option<String>,
    /// Face-to-face contacts in the last year (V30).
    pub contacts: Option<String>,
    /// Lives in a large metropolitan area.
    pub large_metro: Option<String>,
    /// Respondent weight for the unweighted modes; `null` gives weight 1.
    pub weight: Option<String>,
    pub strata: Vec<String>,
}

impl Default for SurveyColumns {
    fn default() -> Self {
        SurveyColumns {
            race: "race".into(),
            stop_public: Some("V11".into()),
            stop_vehicle: Some("V13".into()),
            stop_other: Some("V21".into()),
            contacts: Some("V30".into()),
            large_metro: Some("large_metro".into()),
            weight: None,
            strata: Vec::new(),
        }
    }
}

/// Joins stratum column values; no columns gives the pooled key.
pub fn stratum_key<'a>(values: impl IntoIterator<Item = &'a str>) -> String {
    let parts: Vec<&str> = values.into_iter().map(str::trim).collect();
    if parts.is_empty() {
        POOLED_STRATUM.to_owned()
    } else {
        parts.join(STRATUM_KEY_SEPARATOR)
    }
}
