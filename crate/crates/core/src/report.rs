//! Result tables shared by every command.
//!
//! A [`Report`] is a header block of `key: value` settings followed by rows
//! with a fixed, versioned set of columns ([`COLUMNS`]). Missing numbers are
//! written as `undefined` (the quantity could not be computed) or `NA` (it
//! does not apply to the row); cells are never blank.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::estimator::{EstimateError, EstimateWithCI};

pub const SCHEMA: &str = "postselect-report/1";

pub const COLUMNS: [&str; 10] =
    ["stratum", "estimand", "source", "point", "lo", "hi", "se", "replicates", "undefined_replicates", "flags"];

pub const UNDEFINED: &str = "undefined";
pub const NOT_APPLICABLE: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    JsonLines,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Table => "table",
            Format::Csv => "csv",
            Format::JsonLines => "json-lines",
        }
    }

    /// File extension for reports written to disk.
    pub fn extension(self) -> &'static str {
        match self {
            Format::Table => "txt",
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json-lines" | "jsonl" => Ok(Format::JsonLines),
            other => Err(format!("unknown format `{other}` (expected table, csv or json-lines)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(f64),
    Undefined,
    NotApplicable,
}

impl Cell {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(*v),
            _ => None,
        }
    }

    fn text(&self, precision: Option<usize>) -> String {
        match (self, precision) {
            (Cell::Value(v), _) if !v.is_finite() => UNDEFINED.to_owned(),
            (Cell::Value(v), Some(p)) => format!("{v:.p$}"),
            (Cell::Value(v), None) => v.to_string(),
            (Cell::Undefined, _) => UNDEFINED.to_owned(),
            (Cell::NotApplicable, _) => NOT_APPLICABLE.to_owned(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Value(v) if v.is_finite() => json!(v),
            Cell::NotApplicable => json!(NOT_APPLICABLE),
            _ => json!(UNDEFINED),
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Undefined, Cell::Value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub stratum: String,
    pub estimand: String,
    pub source: String,
    pub point: Cell,
    pub lo: Cell,
    pub hi: Cell,
    pub se: Cell,
    pub replicates: Option<usize>,
    pub undefined_replicates: Option<usize>,
    pub flags: Vec<String>,
}

impl ReportRow {
    /// A point value with no interval or standard error.
    pub fn point(stratum: &str, estimand: &str, source: &str, point: Cell) -> Self {
        ReportRow {
            stratum: stratum.to_owned(),
            estimand: estimand.to_owned(),
            source: source.to_owned(),
            point,
            lo: Cell::NotApplicable,
            hi: Cell::NotApplicable,
            se: Cell::NotApplicable,
            replicates: None,
            undefined_replicates: None,
            flags: Vec::new(),
        }
    }

    /// A bootstrap result, or an undefined row carrying the error.
    pub fn from_estimate(
        stratum: &str,
        estimand: &str,
        source: &str,
        estimate: &Result<EstimateWithCI, EstimateError>,
    ) -> Self {
        match estimate {
            Ok(e) => ReportRow {
                lo: Cell::Value(e.lo),
                hi: Cell::Value(e.hi),
                replicates: Some(e.replicates),
                undefined_replicates: Some(e.undefined_replicates),
                ..ReportRow::point(stratum, estimand, source, Cell::Value(e.point))
            },
            Err(err) => ReportRow::undefined(stratum, estimand, source, err),
        }
    }

    pub fn undefined(stratum: &str, estimand: &str, source: &str, reason: &dyn fmt::Display) -> Self {
        ReportRow {
            lo: Cell::Undefined,
            hi: Cell::Undefined,
            ..ReportRow::point(stratum, estimand, source, Cell::Undefined)
        }
        .with_flag(format!("undefined: {reason}"))
    }

    pub fn with_se(mut self, se: Cell) -> Self {
        self.se = se;
        self
    }

    pub fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }

    fn cells(&self, precision: Option<usize>) -> [String; 10] {
        let count = |c: Option<usize>| c.map_or(NOT_APPLICABLE.to_owned(), |n| n.to_string());
        [
            self.stratum.clone(),
            self.estimand.clone(),
            self.source.clone(),
            self.point.text(precision),
            self.lo.text(precision),
            self.hi.text(precision),
            self.se.text(precision),
            count(self.replicates),
            count(self.undefined_replicates),
            if self.flags.is_empty() { "-".to_owned() } else { self.flags.join("; ") },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub header: Vec<(String, String)>,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { header: vec![("command".into(), command.into())], rows: Vec::new() }
    }

    pub fn set(&mut self, key: &str, value: impl fmt::Display) {
        self.header.push((key.to_owned(), value.to_string()));
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    /// Rows matching `estimand` and `source`, in order.
    pub fn find<'a>(&'a self, estimand: &'a str, source: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.estimand == estimand && r.source == source)
    }

    pub fn write<W: Write + ?Sized>(&self, format: Format, out: &mut W) -> io::Result<()> {
        match format {
            Format::Table => self.write_table(out),
            Format::Csv => self.write_csv(out),
            Format::JsonLines => self.write_json_lines(out),
        }
    }

    pub fn render(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("reports are UTF-8")
    }

    fn write_table<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "schema: {SCHEMA}")?;
        for (k, v) in &self.header {
            writeln!(out, "{k}: {v}")?;
        }
        writeln!(out)?;
        let rows: Vec<[String; 10]> = self.rows.iter().map(|r| r.cells(Some(6))).collect();
        let mut widths = COLUMNS.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
                if i + 1 == cells.len() {
                    s.push_str(cell);
                } else {
                    s.push_str(&format!("{cell:<w$}  "));
                }
            }
            s
        };
        writeln!(out, "{}", line(&COLUMNS.map(String::from)))?;
        for row in &rows {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    }

    fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# schema: {SCHEMA}")?;
        for (k, v) in &self.header {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.cells(None))?;
        }
        w.flush()
    }

    fn write_json_lines<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        let header: Map<String, Value> = self.header.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        writeln!(out, "{}", json!({"schema": SCHEMA, "header": header}))?;
        for row in &self.rows {
            let count = |c: Option<usize>| c.map_or(json!(NOT_APPLICABLE), |n| json!(n));
            let value = json!({
                "stratum": row.stratum,
                "estimand": row.estimand,
                "source": row.source,
                "point": row.point.json(),
                "lo": row.lo.json(),
                "hi": row.hi.json(),
                "se": row.se.json(),
                "replicates": count(row.replicates),
                "undefined_replicates": count(row.undefined_replicates),
                "flags": row.flags,
            });
            writeln!(out, "{value}")?;
        }
        Ok(())
    }
}
