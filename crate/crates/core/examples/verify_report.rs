//! Run the built-in checks and print the report as JSON lines, the same
//! output as `postselect verify --format json-lines`.

use postselect::report::{Cell, Format, Report, ReportRow};
use postselect::verify::{run_verify, VerifyOptions};

fn main() {
    let result = run_verify(&VerifyOptions { oracle_models: 5, ..VerifyOptions::default() });
    let mut report = Report::new("verify");
    report.set("seed", result.options.seed);
    for check in &result.checks {
        report.push(
            ReportRow::point("-", &check.name, "verify", Cell::from(check.value))
                .with_flag(if check.passed { "pass" } else { "FAIL" }),
        );
    }
    print!("{}", report.render(Format::JsonLines));
    std::process::exit(if result.passed() { 0 } else { 1 });
}
