//! Command-line driver. Every number it prints comes from a library call;
//! the driver only loads inputs, chooses strata and formats reports.
//!
//! Exit codes: 0 success, 1 a `verify` check failed, 2 bad input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::estimator::{
    bootstrap, sensitivity_mixture, BootstrapConfig, Estimator, ExternalRaceDistribution, DEFAULT_LEVEL,
    DEFAULT_REPLICATES, DEFAULT_SEED, POOLED_STRATUM,
};
use crate::io::{
    derive_survey_distribution, load_administrative, load_census, load_survey, write_administrative, write_census,
    CensusData, DataConfig, LoadReport, SurveyMode, SurveyRespondentRow,
};
use crate::model::{
    crr_true, estimand_value, naive_rd_true, naive_rr_true, pie_pde, Estimand, PopulationModel,
};
use crate::report::{Cell, Format, Report, ReportRow};
use crate::simulator::{oracle_estimands, race_counts, sample_encounters, to_administrative, write_encounters};
use crate::verify::{run_verify, Fault, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

pub const DEFAULT_SIMULATION_SIZE: usize = 100_000;
pub const DEFAULT_LAMBDA: f64 = 0.9;
pub const DEFAULT_ORACLE_MODELS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "postselect", version, about = "Causal risk ratios from records observed only after a stop")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Simulate encounters and write encounter, administrative, census and oracle files.
    Simulate,
    /// Closed-form estimands of a population model.
    Estimands,
    /// Naive and selection-adjusted risk ratios with bootstrap intervals.
    Estimate,
    /// Adjusted risk ratios under a local/city-wide encounter mixture.
    Sensitivity,
    /// Check the closed forms against known values, properties and simulation.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Estimands => "estimands",
            Command::Estimate => "estimate",
            Command::Sensitivity => "sensitivity",
            Command::Verify => "verify",
        }
    }
}

/// Flags accepted by every command. Each may also come from `--config`.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// TOML or JSON file supplying any of these flags; flags given here win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Population model (TOML or JSON: p_d, pi_al, pi_mi, pi_ma, pi_ne, mu_01, mu_11).
    #[arg(long, global = true)]
    pub model_file: Option<PathBuf>,
    /// Administrative records CSV.
    #[arg(long, global = true)]
    pub admin: Option<PathBuf>,
    /// Census counts CSV.
    #[arg(long, global = true)]
    pub census: Option<PathBuf>,
    /// Survey microdata CSV.
    #[arg(long, global = true)]
    pub survey: Option<PathBuf>,
    /// Comma-separated survey modes: all, mv-stop, stop-in-public, large-metro, weighted, weighted-large-metro.
    #[arg(long, global = true)]
    pub survey_mode: Option<String>,
    /// `all` for every stratum in the administrative data, or comma-separated keys.
    /// Without it, `estimate` pools all records and `sensitivity` uses every stratum.
    #[arg(long, global = true)]
    pub strata: Option<String>,
    /// Master seed for simulation, bootstrap and verify (default 20220314)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Bootstrap replicates.
    #[arg(long, global = true, value_name = "B")]
    pub bootstrap: Option<usize>,
    /// Confidence level of bootstrap intervals.
    #[arg(long, global = true)]
    pub level: Option<f64>,
    /// Weight on the local encounter share in `sensitivity`.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// City-wide minority share for `sensitivity` (default: census total).
    #[arg(long, global = true)]
    pub citywide_p1: Option<f64>,
    /// table, csv or json-lines.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Add 0.5 to every race-by-force cell of the administrative counts.
    #[arg(long, global = true)]
    pub haldane: bool,
    /// Encounters to simulate (`simulate`) or per oracle model (`verify`).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Output directory for `simulate`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Random models in the oracle check of `verify`.
    #[arg(long, global = true)]
    pub oracle_models: Option<usize>,
    #[arg(long, global = true, hide = true)]
    pub inject_fault: bool,
}

/// One string or a list of strings.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn joined(self) -> String {
        match self {
            OneOrMany::One(s) => s,
            OneOrMany::Many(v) => v.join(","),
        }
    }
}

/// Contents of a `--config` file; keys are the flag names.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct FileSettings {
    model_file: Option<PathBuf>,
    admin: Option<PathBuf>,
    census: Option<PathBuf>,
    survey: Option<PathBuf>,
    survey_mode: Option<OneOrMany>,
    strata: Option<OneOrMany>,
    seed: Option<u64>,
    bootstrap: Option<usize>,
    level: Option<f64>,
    lambda: Option<f64>,
    citywide_p1: Option<f64>,
    format: Option<String>,
    haldane: Option<bool>,
    n: Option<usize>,
    out_dir: Option<PathBuf>,
    oracle_models: Option<usize>,
    io: Option<DataConfig>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrataSelection {
    /// All records as one stratum.
    Pooled,
    /// Every stratum of the administrative data.
    All,
    Keys(Vec<String>),
}

/// Settings after merging the config file and flags, with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model_file: Option<PathBuf>,
    pub admin: Option<PathBuf>,
    pub census: Option<PathBuf>,
    pub survey: Option<PathBuf>,
    pub survey_modes: Vec<SurveyMode>,
    pub strata: StrataSelection,
    pub seed: u64,
    pub bootstrap: usize,
    pub level: f64,
    pub lambda: f64,
    pub citywide_p1: Option<f64>,
    pub format: Format,
    pub haldane: bool,
    pub n: usize,
    pub out_dir: PathBuf,
    pub oracle_models: usize,
    pub fault: Option<Fault>,
    pub io: DataConfig,
}

#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> InputError + '_ {
    move |e| InputError(format!("{context}: {e}"))
}

fn read_settings(path: &Path) -> Result<FileSettings, InputError> {
    let text = fs::read_to_string(path).map_err(input(&path.display().to_string()))?;
    let mut settings: FileSettings = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(input(&path.display().to_string()))?
    } else {
        toml::from_str(&text).map_err(input(&path.display().to_string()))?
    };
    // Relative paths in a config file are relative to the file.
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [
        &mut settings.model_file,
        &mut settings.admin,
        &mut settings.census,
        &mut settings.survey,
        &mut settings.out_dir,
    ]
    .into_iter()
    .flatten()
    {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(settings)
}

fn parse_list<T: std::str::FromStr<Err = String>>(raw: &str) -> Result<Vec<T>, InputError> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| s.parse().map_err(InputError)).collect()
}

impl RunConfig {
    pub fn resolve(command: Command, flags: Flags) -> Result<RunConfig, InputError> {
        let file = match &flags.config {
            Some(path) => read_settings(path)?,
            None => FileSettings::default(),
        };
        let format = match (flags.format, file.format) {
            (Some(f), _) => f,
            (None, Some(raw)) => raw.parse().map_err(InputError)?,
            (None, None) => Format::default(),
        };
        let survey_modes = match flags.survey_mode.or(file.survey_mode.map(OneOrMany::joined)) {
            Some(raw) => parse_list::<SurveyMode>(&raw)?,
            None => vec![SurveyMode::All],
        };
        let strata = match flags.strata.or(file.strata.map(OneOrMany::joined)) {
            None if command == Command::Sensitivity => StrataSelection::All,
            None => StrataSelection::Pooled,
            Some(raw) if raw.trim() == "all" => StrataSelection::All,
            Some(raw) => {
                let keys: Vec<String> = raw.split(',').map(|s| s.trim().to_owned()).filter(|s| !s.is_empty()).collect();
                if keys.is_empty() {
                    return Err(InputError("--strata lists no strata".into()));
                }
                StrataSelection::Keys(keys)
            }
        };
        let config = RunConfig {
            command,
            model_file: flags.model_file.or(file.model_file),
            admin: flags.admin.or(file.admin),
            census: flags.census.or(file.census),
            survey: flags.survey.or(file.survey),
            survey_modes,
            strata,
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            bootstrap: flags.bootstrap.or(file.bootstrap).unwrap_or(DEFAULT_REPLICATES),
            level: flags.level.or(file.level).unwrap_or(DEFAULT_LEVEL),
            lambda: flags.lambda.or(file.lambda).unwrap_or(DEFAULT_LAMBDA),
            citywide_p1: flags.citywide_p1.or(file.citywide_p1),
            format,
            haldane: flags.haldane || file.haldane.unwrap_or(false),
            n: flags.n.or(file.n).unwrap_or(DEFAULT_SIMULATION_SIZE),
            out_dir: flags.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from(".")),
            oracle_models: flags.oracle_models.or(file.oracle_models).unwrap_or(DEFAULT_ORACLE_MODELS),
            fault: flags.inject_fault.then_some(Fault::SwapPrevalenceInAteM1),
            io: file.io.unwrap_or_default(),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), InputError> {
        if self.bootstrap < 2 {
            return Err(InputError(format!("--bootstrap must be at least 2, got {}", self.bootstrap)));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(InputError(format!("--level must lie in (0, 1), got {}", self.level)));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(InputError(format!("--lambda must lie in [0, 1], got {}", self.lambda)));
        }
        if let Some(p) = self.citywide_p1 {
            if !(p > 0.0 && p < 1.0) {
                return Err(InputError(format!("--citywide-p1 must lie in (0, 1), got {p}")));
            }
        }
        if self.n == 0 {
            return Err(InputError("--n must be at least 1".into()));
        }
        Ok(())
    }

    pub fn bootstrap_config(&self) -> BootstrapConfig {
        BootstrapConfig { replicates: self.bootstrap, level: self.level, seed: self.seed, haldane: self.haldane }
    }

    fn header(&self, report: &mut Report) {
        report.set("seed", self.seed);
        if matches!(self.command, Command::Estimate | Command::Sensitivity) {
            report.set("bootstrap", self.bootstrap);
            report.set("level", self.level);
            report.set("interval", "percentile");
            report.set("haldane", self.haldane);
            report.set(
                "strata",
                match &self.strata {
                    StrataSelection::Pooled => "pooled".to_owned(),
                    StrataSelection::All => "all".to_owned(),
                    StrataSelection::Keys(k) => k.join(","),
                },
            );
        }
    }
}

pub fn load_model(path: &Path) -> Result<PopulationModel, InputError> {
    let text = fs::read_to_string(path).map_err(input(&path.display().to_string()))?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(input(&path.display().to_string()))
    } else {
        toml::from_str(&text).map_err(input(&path.display().to_string()))
    }
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str, command: Command) -> Result<&'a Path, InputError> {
    path.as_deref().ok_or_else(|| InputError(format!("`{}` needs --{flag}", command.name())))
}

fn describe_load(report: &LoadReport) -> String {
    format!("loaded={} dropped={} unparseable={}", report.loaded, report.dropped, report.unparseable)
}

fn model_header(report: &mut Report, model: &PopulationModel) {
    let [al, mi, ma, ne] = model.strata_masses();
    report.set(
        "model",
        format!(
            "p_d={} pi_al={al} pi_mi={mi} pi_ma={ma} pi_ne={ne} mu_01={} mu_11={}",
            model.p_d(),
            model.mu_01(),
            model.mu_11()
        ),
    );
}

pub fn cmd_simulate(config: &RunConfig) -> Result<Report, InputError> {
    let model = load_model(require(&config.model_file, "model-file", config.command)?)?;
    let table = sample_encounters(&model, config.n, config.seed).map_err(input("simulate"))?;
    let oracle = oracle_estimands(&table);

    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(input(&dir.display().to_string()))?;
    let create = |name: &str| {
        let path = dir.join(name);
        fs::File::create(&path).map_err(input(&path.display().to_string()))
    };
    write_encounters(&table, create("encounters.csv")?).map_err(input("encounters.csv"))?;
    write_administrative(&to_administrative(&table), create("administrative.csv")?)
        .map_err(input("administrative.csv"))?;
    let (d1, d0) = race_counts(&table);
    write_census(&[(POOLED_STRATUM.to_owned(), d1, d0)], create("census.csv")?).map_err(input("census.csv"))?;

    let mut report = Report::new("simulate");
    config.header(&mut report);
    model_header(&mut report, &model);
    report.set("n", oracle.n);
    report.set("n_detained", oracle.n_detained);
    for (name, value) in oracle.fields() {
        let row = ReportRow::point(POOLED_STRATUM, name, "simulation", Cell::from(value.map(|v| v.value)));
        report.push(row.with_se(Cell::from(value.map(|v| v.se))));
    }
    report.push(ReportRow::point(POOLED_STRATUM, "encounter_share", "simulation", oracle.encounter_share.into()));
    report.push(ReportRow::point(POOLED_STRATUM, "detained_share", "simulation", oracle.detained_share.into()));

    let name = format!("oracle.{}", config.format.extension());
    let mut file = create(&name)?;
    report.write(config.format, &mut file).map_err(input(&name))?;
    Ok(report)
}

pub fn cmd_estimands(config: &RunConfig) -> Result<Report, InputError> {
    let model = load_model(require(&config.model_file, "model-file", config.command)?)?;
    let mut report = Report::new("estimands");
    model_header(&mut report, &model);
    let source = "closed-form";
    let row = |name: &str, cell: Cell| ReportRow::point(POOLED_STRATUM, name, source, cell);
    for e in Estimand::ALL {
        match estimand_value(e, &model) {
            Ok(v) => {
                report.push(row(e.name(), Cell::Value(v.normalized)).with_flag("normalized"));
                report.push(row(&format!("{}_raw", e.name()), Cell::Value(v.raw)).with_flag(format!("raw; mass={}", (v.mass * 1e12).round() / 1e12)));
            }
            Err(err) => {
                report.push(ReportRow::undefined(POOLED_STRATUM, e.name(), source, &err));
                report.push(ReportRow::undefined(POOLED_STRATUM, &format!("{}_raw", e.name()), source, &err));
            }
        }
    }
    let d = pie_pde(&model);
    report.push(row("PIE", Cell::Value(d.pie)));
    report.push(row("PDE", Cell::Value(d.pde)));
    match crr_true(&model) {
        Ok(v) => report.push(row("CRR", Cell::Value(v))),
        Err(e) => report.push(ReportRow::undefined(POOLED_STRATUM, "CRR", source, &e)),
    }
    report.push(row("beta_M", Cell::Value(model.beta_m())));
    report.push(row("beta_Y", Cell::Value(model.beta_y())));
    match naive_rr_true(&model) {
        Ok(v) => report.push(row("naive_RR", Cell::Value(v))),
        Err(e) => report.push(ReportRow::undefined(POOLED_STRATUM, "naive_RR", source, &e)),
    }
    report.push(row("naive_RD", Cell::Value(naive_rd_true(&model))));
    report.push(row("stop_rate", Cell::Value(model.detained_mass())));
    report.push(row("detained_share", model.minority_share_detained().into()));
    Ok(report)
}

/// External sources named as they appear in the `source` column.
struct Externals {
    census: Option<(CensusData, ExternalRaceDistribution)>,
    surveys: Vec<(SurveyMode, ExternalRaceDistribution)>,
}

fn load_inputs(
    config: &RunConfig,
    report: &mut Report,
) -> Result<(crate::estimator::AdministrativeDataset, Vec<String>, Externals), InputError> {
    let admin_path = require(&config.admin, "admin", config.command)?;
    let (data, load) = load_administrative(admin_path, &config.io).map_err(input("--admin"))?;
    report.set("admin", format!("{} ({})", admin_path.display(), describe_load(&load)));

    let pooled = config.strata == StrataSelection::Pooled;
    let (data, strata) = match &config.strata {
        StrataSelection::Pooled => (data.pooled(), vec![POOLED_STRATUM.to_owned()]),
        StrataSelection::All => {
            let keys = data.stratum_keys().to_vec();
            (data, keys)
        }
        StrataSelection::Keys(keys) => {
            if let Some(missing) = keys.iter().find(|k| !data.contains_stratum(k)) {
                return Err(InputError(format!("unknown stratum `{missing}` in --strata")));
            }
            let keys = keys.clone();
            (data, keys)
        }
    };

    let census = match &config.census {
        Some(path) => {
            let census = load_census(path, &config.io).map_err(input("--census"))?;
            report.set("census", format!("{} ({})", path.display(), describe_load(&census.report)));
            let undefined = census.undefined_strata();
            if !undefined.is_empty() {
                report.set("census_undefined_strata", undefined.join(","));
            }
            let dist = if pooled {
                ExternalRaceDistribution::census([(POOLED_STRATUM, census.overall_share())])
                    .expect("shares from counts are probabilities")
            } else {
                census.distribution.clone()
            };
            Some((census, dist))
        }
        None => None,
    };

    let mut surveys = Vec::new();
    if let Some(path) = &config.survey {
        let (mut rows, load) = load_survey(path, &config.io).map_err(input("--survey"))?;
        report.set("survey", format!("{} ({})", path.display(), describe_load(&load)));
        if pooled {
            rows = rows.into_iter().map(|r| SurveyRespondentRow { stratum: POOLED_STRATUM.to_owned(), ..r }).collect();
        }
        for &mode in &config.survey_modes {
            let dist = derive_survey_distribution(&rows, mode).map_err(input("--survey"))?;
            surveys.push((mode, dist));
        }
        report.set("survey_modes", config.survey_modes.iter().map(|m| m.name()).collect::<Vec<_>>().join(","));
    }
    Ok((data, strata, Externals { census, surveys }))
}

fn adjusted_rows(
    report: &mut Report,
    data: &crate::estimator::AdministrativeDataset,
    x: &str,
    source: &str,
    external: &ExternalRaceDistribution,
    boot: &BootstrapConfig,
) {
    let haldane = |row: ReportRow| if boot.haldane { row.with_flag("haldane+0.5") } else { row };
    let bf = bootstrap(Estimator::BiasFactor, data, Some(external), x, boot);
    report.push(haldane(ReportRow::from_estimate(x, "bias_factor", source, &bf).with_flag("bias-factor")));
    let crr = bootstrap(Estimator::CrrIdentified, data, Some(external), x, boot);
    report.push(haldane(ReportRow::from_estimate(x, "crr", source, &crr).with_flag("adjusted")));
}

pub fn cmd_estimate(config: &RunConfig) -> Result<Report, InputError> {
    let mut report = Report::new("estimate");
    config.header(&mut report);
    let (data, strata, externals) = load_inputs(config, &mut report)?;
    let boot = config.bootstrap_config();
    for x in &strata {
        let naive = bootstrap(Estimator::NaiveRiskRatio, &data, None, x, &boot);
        let mut row = ReportRow::from_estimate(x, "naive_rr", "admin", &naive).with_flag("naive");
        if boot.haldane {
            row = row.with_flag("haldane+0.5");
        }
        report.push(row);
        if let Some((_, census)) = &externals.census {
            adjusted_rows(&mut report, &data, x, "census", census, &boot);
        }
        for (mode, survey) in &externals.surveys {
            adjusted_rows(&mut report, &data, x, &format!("survey:{mode}"), survey, &boot);
        }
    }
    Ok(report)
}

pub fn cmd_sensitivity(config: &RunConfig) -> Result<Report, InputError> {
    let mut report = Report::new("sensitivity");
    config.header(&mut report);
    let (data, strata, externals) = load_inputs(config, &mut report)?;
    let (census, base) =
        externals.census.ok_or_else(|| InputError("`sensitivity` needs --census".into()))?;
    let citywide = match config.citywide_p1 {
        Some(p) => p,
        None => census
            .overall_share()
            .filter(|p| *p > 0.0 && *p < 1.0)
            .ok_or_else(|| InputError("census total share is not in (0, 1); pass --citywide-p1".into()))?,
    };
    report.set("lambda", config.lambda);
    report.set("citywide_p1", citywide);
    let mixed = sensitivity_mixture(&base, citywide, config.lambda).map_err(input("sensitivity"))?;
    let boot = config.bootstrap_config();
    let mixed_source = format!("census:mixed(lambda={})", config.lambda);
    for x in &strata {
        for (source, ext) in [("census", &base), (mixed_source.as_str(), &mixed)] {
            let share = match ext.p1(x) {
                Ok(p) => ReportRow::point(x, "encounter_share", source, Cell::Value(p)),
                Err(e) => ReportRow::undefined(x, "encounter_share", source, &e),
            };
            report.push(share);
            let crr = bootstrap(Estimator::CrrIdentified, &data, Some(ext), x, &boot);
            let mut row = ReportRow::from_estimate(x, "crr", source, &crr).with_flag("adjusted");
            if boot.haldane {
                row = row.with_flag("haldane+0.5");
            }
            report.push(row);
        }
    }
    Ok(report)
}

pub fn cmd_verify(config: &RunConfig) -> (Report, bool) {
    let options = VerifyOptions {
        seed: config.seed,
        oracle_n: config.n,
        oracle_models: config.oracle_models,
        fault: config.fault,
        ..VerifyOptions::default()
    };
    let result = run_verify(&options);
    let mut report = Report::new("verify");
    config.header(&mut report);
    report.set("sign_models", options.sign_models);
    report.set("paradox_draws", options.paradox_draws);
    report.set("oracle_models", options.oracle_models);
    report.set("oracle_n", options.oracle_n);
    if options.fault.is_some() {
        report.set("fault", "ATE_M1 prevalence swapped");
    }
    for check in &result.checks {
        report.push(
            ReportRow::point("-", &check.name, "verify", Cell::from(check.value))
                .with_flag(if check.passed { "pass" } else { "FAIL" })
                .with_flag(check.detail.clone()),
        );
    }
    report.set("result", if result.passed() { "pass" } else { "FAIL" });
    (report, result.passed())
}

/// Runs one command. Returns the report and whether it counts as success.
pub fn execute(config: &RunConfig) -> Result<(Report, bool), InputError> {
    Ok(match config.command {
        Command::Simulate => (cmd_simulate(config)?, true),
        Command::Estimands => (cmd_estimands(config)?, true),
        Command::Estimate => (cmd_estimate(config)?, true),
        Command::Sensitivity => (cmd_sensitivity(config)?, true),
        Command::Verify => cmd_verify(config),
    })
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = RunConfig::resolve(cli.command, cli.flags).and_then(|config| {
        let (report, ok) = execute(&config)?;
        report.write(config.format, out).map_err(input("output"))?;
        Ok(ok)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Race;

    fn resolve(args: &[&str]) -> Result<RunConfig, InputError> {
        let cli = Cli::try_parse_from(args).unwrap();
        RunConfig::resolve(cli.command, cli.flags)
    }

    #[test]
    fn defaults() {
        let cfg = resolve(&["postselect", "estimate"]).unwrap();
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!((cfg.bootstrap, cfg.level), (1000, 0.95));
        assert_eq!(cfg.strata, StrataSelection::Pooled);
        assert_eq!(cfg.survey_modes, vec![SurveyMode::All]);
        assert_eq!(resolve(&["postselect", "sensitivity"]).unwrap().strata, StrataSelection::All);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "seed = 5\nbootstrap = 50\nadmin = \"a.csv\"\nsurvey-mode = [\"weighted\", \"mv-stop\"]\n\
             format = \"csv\"\n[io]\nrace_map = { BLACK = 1, WHITE = 0 }\n",
        )
        .unwrap();
        let cfg = resolve(&["postselect", "estimate", "--config", path.to_str().unwrap(), "--seed", "9"]).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.bootstrap, 50);
        assert_eq!(cfg.admin, Some(dir.path().join("a.csv")));
        assert_eq!(cfg.survey_modes, vec![SurveyMode::Weighted, SurveyMode::MvStop]);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.io.map_race("BLACK"), Some(Race::Minority));
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(resolve(&["postselect", "estimate", "--level", "1.5"]).is_err());
        assert!(resolve(&["postselect", "estimate", "--survey-mode", "ppcs"]).is_err());
        assert!(resolve(&["postselect", "estimate", "--bootstrap", "1"]).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        fs::write(&path, r#"{"colour": 1}"#).unwrap();
        assert!(resolve(&["postselect", "verify", "--config", path.to_str().unwrap()]).is_err());
    }

    #[test]
    fn exit_codes() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["postselect", "frobnicate"], &mut out, &mut err), EXIT_INPUT_ERROR);
        assert_eq!(run(["postselect", "estimate"], &mut out, &mut err), EXIT_INPUT_ERROR);
        assert_eq!(run(["postselect", "--help"], &mut out, &mut err), EXIT_OK);
    }
}
