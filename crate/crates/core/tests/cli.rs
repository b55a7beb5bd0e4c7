//! End-to-end runs of the `postselect` binary. Golden files live in
//! `tests/golden/`; set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_str().unwrap().to_owned()
}

fn postselect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_postselect")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = postselect(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows of a CSV report, header comments skipped.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

fn find<'a>(rows: &'a [Vec<String>], stratum: &str, estimand: &str, source: &str) -> &'a Vec<String> {
    rows.iter()
        .find(|r| r[0] == stratum && r[1] == estimand && r[2] == source)
        .unwrap_or_else(|| panic!("no row {stratum}/{estimand}/{source}"))
}

fn value(row: &[String]) -> f64 {
    row[3].parse().unwrap()
}

fn check_golden(name: &str, actual: &str) {
    let actual = actual.replace(fixtures().to_str().unwrap(), "<fixtures>");
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &actual).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

fn write_model(dir: &Path, name: &str, p_d: f64, pi: [f64; 4], mu_01: f64, mu_11: f64) -> String {
    let path = dir.join(name);
    fs::write(
        &path,
        format!(
            "p_d = {p_d}\npi_al = {}\npi_mi = {}\npi_ma = {}\npi_ne = {}\nmu_01 = {mu_01}\nmu_11 = {mu_11}\n",
            pi[0], pi[1], pi[2], pi[3]
        ),
    )
    .unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn golden_estimands() {
    let toy = fixture("toy.toml");
    check_golden("estimands_toy.csv", &stdout(&["estimands", "--model-file", &toy, "--format", "csv"]));
    check_golden("estimands_toy.jsonl", &stdout(&["estimands", "--model-file", &toy, "--format", "json-lines"]));
    check_golden("estimands_toy.txt", &stdout(&["estimands", "--model-file", &toy]));
}

#[test]
fn golden_estimate_and_sensitivity() {
    let config = fixture("precincts.toml");
    check_golden(
        "estimate_precincts.csv",
        &stdout(&["estimate", "--config", &config, "--strata", "all", "--format", "csv"]),
    );
    check_golden("estimate_pooled.jsonl", &stdout(&["estimate", "--config", &config, "--format", "json-lines"]));
    check_golden(
        "sensitivity_precincts.csv",
        &stdout(&["sensitivity", "--config", &config, "--citywide-p1", "0.367", "--format", "csv"]),
    );
}

#[test]
fn golden_simulate_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let report = stdout(&["simulate", "--model-file", &fixture("toy.toml"), "--n", "5000", "--out-dir", out, "--format", "csv"]);
    check_golden("simulate_toy_oracle.csv", &report);
    assert_eq!(fs::read_to_string(dir.path().join("oracle.csv")).unwrap(), report);
}

#[test]
fn exit_codes() {
    assert_eq!(postselect(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(postselect(&["estimate", "--admin", "/nonexistent/admin.csv"]).status.code(), Some(2));
    assert_eq!(postselect(&["estimands"]).status.code(), Some(2));
    assert_eq!(postselect(&["estimate", "--level", "2"]).status.code(), Some(2));
    let config = fixture("precincts.toml");
    assert_eq!(postselect(&["estimate", "--config", &config, "--strata", "999"]).status.code(), Some(2));
    let quick = ["verify", "--oracle-models", "2", "--n", "20000"];
    assert_eq!(postselect(&quick).status.code(), Some(0));
    let mut faulty = quick.to_vec();
    faulty.push("--inject-fault");
    let out = postselect(&faulty);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn simulate_is_byte_identical_for_a_seed() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let toy = fixture("toy.toml");
    for (dir, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        stdout(&["simulate", "--model-file", &toy, "--n", "70000", "--seed", seed, "--out-dir", dir.path().to_str().unwrap()]);
    }
    for name in ["encounters.csv", "administrative.csv", "census.csv", "oracle.txt"] {
        let read = |d: &tempfile::TempDir| fs::read(d.path().join(name)).unwrap();
        assert_eq!(read(&a), read(&b), "{name}");
        if name != "census.csv" {
            assert_ne!(read(&a), read(&c), "{name}");
        }
    }
}

#[test]
fn simulate_toy_oracle_near_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let report = stdout(&[
        "simulate", "--model-file", &fixture("toy.toml"), "--n", "100000", "--out-dir", dir.path().to_str().unwrap(),
        "--format", "csv",
    ]);
    let rows = csv_rows(&report);
    let crr = find(&rows, "ALL", "CRR", "simulation");
    let se: f64 = crr[6].parse().unwrap();
    assert!((value(crr) - 3.0).abs() <= 4.0 * se, "{crr:?}");
}

#[test]
fn never_stopped_population_has_empty_administrative_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(dir.path(), "m.toml", 0.5, [0.0, 0.0, 0.0, 1.0], 0.1, 0.2);
    let out = dir.path().join("sim");
    let report = stdout(&["simulate", "--model-file", &model, "--n", "1000", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(out.join("administrative.csv")).unwrap(), "race,force,stratum\n");
    assert!(report.contains("undefined"));
}

#[test]
fn estimands_rows() {
    let dir = tempfile::tempdir().unwrap();
    let toy = csv_rows(&stdout(&["estimands", "--model-file", &fixture("toy.toml"), "--format", "csv"]));
    let get = |rows: &[Vec<String>], e: &str| value(find(rows, "ALL", e, "closed-form"));
    assert!((get(&toy, "PIE") + get(&toy, "PDE") - get(&toy, "ATE")).abs() < 1e-12);

    // Counterexample with positive effects and P(D=1) = 0.01.
    let first = write_model(dir.path(), "c1.toml", 0.01, [0.1, 0.06, 0.05, 0.79], 0.1, 0.11);
    let rows = csv_rows(&stdout(&["estimands", "--model-file", &first, "--format", "csv"]));
    assert_eq!(format!("{:.6}", get(&rows, "ATE_M1_raw")), "-0.003884");

    // No effect of D on Y: equal escalation rates and equal complier/defier shares.
    let symmetric = dir.path().join("sym.json").to_str().unwrap().to_owned();
    fs::write(
        &symmetric,
        r#"{"p_d": 0.3, "pi_al": 0.2, "pi_mi": 0.1, "pi_ma": 0.1, "pi_ne": 0.6, "mu_01": 0.2, "mu_11": 0.2}"#,
    )
    .unwrap();
    let rows = csv_rows(&stdout(&["estimands", "--model-file", &symmetric, "--format", "csv"]));
    assert!((get(&rows, "CRR") - 1.0).abs() < 1e-12);

    let never = write_model(dir.path(), "never.toml", 0.5, [0.0, 0.0, 0.0, 1.0], 0.1, 0.2);
    let rows = csv_rows(&stdout(&["estimands", "--model-file", &never, "--format", "csv"]));
    assert_eq!(find(&rows, "ALL", "ATE_M1", "closed-form")[3], "undefined");
}

#[test]
fn estimate_without_external_has_only_naive_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("admin_only.toml");
    fs::write(
        &config,
        format!(
            "admin = \"{}\"\nbootstrap = 50\n[io]\nrace_map = {{ BLACK = 1, WHITE = 0 }}\nstrict = false\n[io.admin]\nforce = \"any_force\"\nstrata = [\"precinct\"]\n",
            fixture("precincts_admin.csv")
        ),
    )
    .unwrap();
    let rows = csv_rows(&stdout(&["estimate", "--config", config.to_str().unwrap(), "--strata", "all", "--format", "csv"]));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[1] == "naive_rr" && r[2] == "admin"));
}

#[test]
fn matching_external_leaves_naive_unchanged() {
    // 40 of 100 detainees are minority; census share 0.4.
    let dir = tempfile::tempdir().unwrap();
    let mut admin = String::from("race,force,stratum\n");
    for i in 0..100 {
        admin.push_str(&format!("{},{},ALL\n", u8::from(i < 40), u8::from(i % 3 == 0)));
    }
    fs::write(dir.path().join("admin.csv"), admin).unwrap();
    fs::write(dir.path().join("census.csv"), "stratum,count_d1,count_d0\nALL,400,600\n").unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_owned();
    let rows = csv_rows(&stdout(&[
        "estimate", "--admin", &p("admin.csv"), "--census", &p("census.csv"), "--format", "csv", "--bootstrap", "100",
    ]));
    let naive = find(&rows, "ALL", "naive_rr", "admin");
    let adjusted = find(&rows, "ALL", "crr", "census");
    assert!((value(find(&rows, "ALL", "bias_factor", "census")) - 1.0).abs() < 1e-12);
    // Replicates resample the race mix too, so only the points coincide.
    assert!((value(naive) - value(adjusted)).abs() < 1e-12, "{naive:?} vs {adjusted:?}");
}

#[test]
fn simulated_fixture_with_matching_external_recovers_race_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let oracle = csv_rows(&stdout(&["simulate", "--model-file", &fixture("toy.toml"), "--n", "100000", "--out-dir", out, "--format", "csv"]));
    let rows = csv_rows(&stdout(&[
        "estimate",
        "--admin",
        &format!("{out}/administrative.csv"),
        "--census",
        &format!("{out}/census.csv"),
        "--format",
        "csv",
        "--bootstrap",
        "200",
    ]));
    let adjusted = value(find(&rows, "ALL", "crr", "census"));
    let observed = value(find(&oracle, "ALL", "CRR_by_race", "simulation"));
    assert!((adjusted - observed).abs() < 1e-10, "{adjusted} vs {observed}");
    let crr = find(&oracle, "ALL", "CRR", "simulation");
    assert!((adjusted - 3.0).abs() < 4.0 * crr[6].parse::<f64>().unwrap().max(0.05));
}

#[test]
fn sensitivity_limits() {
    let config = fixture("precincts.toml");
    let estimate = csv_rows(&stdout(&["estimate", "--config", &config, "--strata", "all", "--format", "csv"]));
    let unmixed = csv_rows(&stdout(&["sensitivity", "--config", &config, "--lambda", "1", "--format", "csv"]));
    for stratum in ["1", "67", "22"] {
        let e = find(&estimate, stratum, "crr", "census");
        assert_eq!(&find(&unmixed, stratum, "crr", "census:mixed(lambda=1)")[3..9], &e[3..9]);
    }
    let all_city = csv_rows(&stdout(&[
        "sensitivity", "--config", &config, "--lambda", "0", "--citywide-p1", "0.367", "--format", "csv",
    ]));
    for stratum in ["1", "67", "22"] {
        assert_eq!(value(find(&all_city, stratum, "encounter_share", "census:mixed(lambda=0)")), 0.367);
    }
}

#[test]
fn flags_override_config_file() {
    let config = fixture("precincts.toml");
    let text = stdout(&["estimate", "--config", &config, "--seed", "99", "--bootstrap", "20", "--format", "csv"]);
    assert!(text.contains("# seed: 99\n") && text.contains("# bootstrap: 20\n"));
    let text = stdout(&["estimate", "--config", &config, "--format", "csv"]);
    assert!(text.contains("# seed: 7\n") && text.contains("# bootstrap: 200\n"));
}

#[test]
fn haldane_is_labelled() {
    let text = stdout(&["estimate", "--config", &fixture("precincts.toml"), "--haldane", "--bootstrap", "20", "--format", "csv"]);
    assert!(text.contains("# haldane: true"));
    let rows = csv_rows(&text);
    assert!(rows.iter().filter(|r| r[1] != "encounter_share").all(|r| r[9].contains("haldane+0.5")));
}
