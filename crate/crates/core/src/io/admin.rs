use std::io::{Read, Write};
use std::path::Path;

use crate::estimator::AdministrativeDataset;

use super::{column_index, open, parse_flag, reader, reject, stratum_key, DataConfig, IoError, LoadReport};

pub fn load_administrative(path: &Path, config: &DataConfig) -> Result<(AdministrativeDataset, LoadReport), IoError> {
    read_administrative(open(path)?, config)
}

/// Reads detained-encounter records. Rows whose race is not in the race map
/// are dropped and counted.
pub fn read_administrative<R: Read>(input: R, config: &DataConfig) -> Result<(AdministrativeDataset, LoadReport), IoError> {
    if config.race_map.is_empty() {
        return Err(IoError::Config("race_map must list at least one race value".into()));
    }
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let race_col = column_index(&headers, &config.admin.race)?;
    let force_col = column_index(&headers, &config.admin.force)?;
    let strata_cols = config
        .admin
        .strata
        .iter()
        .map(|c| column_index(&headers, c))
        .collect::<Result<Vec<_>, _>>()?;

    let mut data = AdministrativeDataset::new();
    let mut report = LoadReport::default();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let (Some(race), Some(force)) = (record.get(race_col), record.get(force_col)) else {
            reject(&mut report, config.strict, line, "row has too few fields".into())?;
            continue;
        };
        let Some(strata) = strata_cols.iter().map(|&i| record.get(i)).collect::<Option<Vec<_>>>() else {
            reject(&mut report, config.strict, line, "row has too few fields".into())?;
            continue;
        };
        let Some(y) = parse_flag(force) else {
            reject(&mut report, config.strict, line, format!("force value `{force}` is not 0/1"))?;
            continue;
        };
        match config.map_race(race) {
            Some(d) => {
                data.push(d, y, &stratum_key(strata));
                report.loaded += 1;
            }
            None => report.dropped += 1,
        }
    }
    Ok((data, report))
}

/// Writes records with header `race,force,stratum`, race coded `0`/`1`.
/// Readable with the default [`DataConfig`].
pub fn write_administrative<W: Write>(data: &AdministrativeDataset, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["race", "force", "stratum"])?;
    for row in data.rows() {
        let race = if row.d.is_minority() { "1" } else { "0" };
        w.write_record([race, if row.y { "1" } else { "0" }, data.stratum_of(row)])?;
    }
    w.flush()?;
    Ok(())
}
