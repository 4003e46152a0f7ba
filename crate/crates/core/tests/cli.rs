use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use hyperabsorb::cli::SweepRecord;
use hyperabsorb::report::ScenarioReport;
use tempfile::NamedTempFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperabsorb"))
}

fn config(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], path: &Path) -> Output {
    bin().args(args).arg(path).output().unwrap()
}

const ENTANGLED: &str = r#"
[scenario]
kind = "entangled"
alpha = 0.1
gamma = 0.1

[scenario.overlaps]
a = 0.9
c = 0.9
"#;

#[test]
fn run_reference_scenario_as_json() {
    let f = config(ENTANGLED);
    let out = run(&["--output", "json-lines", "run"], f.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let r: ScenarioReport = serde_json::from_str(stdout.trim()).unwrap();
    assert!((r.p_double_indistinguishable - 2.0e-4).abs() < 1e-15);
    assert!((r.entropy_initial - 1.0).abs() < 1e-12);
    assert!((r.entropy_final - 1.0).abs() < 1e-12);
    assert_eq!(r.classification.as_str(), "non-product hyperentangled");
    let again = serde_json::to_string(&r).unwrap();
    assert_eq!(again, stdout.trim());
}

#[test]
fn output_is_byte_identical_across_runs() {
    let f = config(ENTANGLED);
    for format in ["csv", "json-lines", "table"] {
        let a = run(&["run", "--output", format], f.path());
        let b = run(&["run", "--output", format], f.path());
        assert_eq!(a.stdout, b.stdout);
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn csv_has_documented_header() {
    let f = config(ENTANGLED);
    let out = run(&["run", "--output", "csv"], f.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, ScenarioReport::COLUMNS.join(","));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn product_kind_is_separable() {
    let f = config(&ENTANGLED.replace("entangled", "product"));
    let out = run(&["run", "--output", "json-lines"], f.path());
    let r: ScenarioReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.entropy_final, 0.0);
    assert_eq!(r.classification.as_str(), "separable");
}

#[test]
fn normalization_error_exits_2_with_line() {
    let f = config(
        "[scenario]\nkind = \"entangled\"\nalpha = 0.1\nbeta = 0.94\ngamma = 0.1\n\n[scenario.overlaps]\na = 0.9\nc = 0.9\n",
    );
    let out = run(&["run"], f.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("|alpha|^2 + |beta|^2"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_file_and_bad_flags_exit_2() {
    let out = bin().args(["run", "/nonexistent/config.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let f = config(ENTANGLED);
    assert_eq!(run(&["run", "--tolerance", "2"], f.path()).status.code(), Some(2));
    assert_eq!(run(&["run", "--output", "xml"], f.path()).status.code(), Some(2));
}

#[test]
fn degenerate_spectrum_exits_3() {
    let f = config("[scenario]\nkind = \"entangled\"\nalpha = 1.0\ngamma = 1.0\n\n[scenario.overlaps]\na = 0.0\nc = 1.0\n");
    let out = run(&["run"], f.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn alpha_sweep_doubles_alpha_gamma_squared() {
    let f = config(&format!(
        "{ENTANGLED}\n[[sweep.axes]]\npath = \"alpha\"\nstart = 0.05\nstop = 0.25\ncount = 5\n"
    ));
    let out = run(&["sweep", "--output", "json-lines"], f.path());
    assert_eq!(out.status.code(), Some(0));
    let records: Vec<SweepRecord> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 5);
    for (i, rec) in records.iter().enumerate() {
        assert_eq!(rec.point, i);
        let alpha = rec.coordinates[0].value;
        let r = rec.report.as_ref().unwrap();
        assert!((r.p_double_indistinguishable - 2.0 * alpha * alpha * 0.01).abs() < 1e-15);
    }
}

#[test]
fn recoil_sweep_flips_classification() {
    let f = config(
        "[scenario]\nkind = \"entangled\"\nalpha = 0.1\ngamma = 0.1\n\n[scenario.overlaps]\nsigma_x = 1.0\nk_recoil = 0.0\n\n[[sweep.axes]]\npath = \"overlaps.k_recoil\"\nstart = 0.0\nstop = 1.0\ncount = 3\n",
    );
    let out = run(&["sweep", "--output", "csv"], f.path());
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "classification").unwrap();
    let classes: Vec<String> = reader.records().map(|r| r.unwrap()[col].to_string()).collect();
    assert_eq!(
        classes,
        [
            "single-dof entangled",
            "non-product hyperentangled",
            "non-product hyperentangled"
        ]
    );
}

#[test]
fn short_axis_exits_2() {
    let f = config(&format!(
        "{ENTANGLED}\n[[sweep.axes]]\npath = \"alpha\"\nstart = 0.1\nstop = 0.2\ncount = 1\n"
    ));
    assert_eq!(run(&["sweep"], f.path()).status.code(), Some(2));
}

#[test]
fn failing_sweep_points_are_recorded() {
    let f = config(&format!(
        "{ENTANGLED}\n[[sweep.axes]]\npath = \"alpha\"\nstart = 0.5\nstop = 1.5\ncount = 3\n"
    ));
    let out = run(&["sweep", "--output", "json-lines"], f.path());
    assert_eq!(out.status.code(), Some(2));
    let records: Vec<SweepRecord> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 3);
    assert!(records[0].report.is_some() && records[1].report.is_some());
    assert!(records[2].error.is_some());
}

#[test]
fn quiet_check_prints_only_data() {
    let out = bin().args(["check", "--quiet"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 8);
}

#[test]
fn injected_fault_fails_check() {
    let out = bin()
        .args(["check", "--inject-fault", "lambda-sign"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args(["check", "--inject-fault", "no-such-fault"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bundled_configs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for (sub, name) in [
        ("run", "entangled.toml"),
        ("run", "complex_gaussian.toml"),
        ("sweep", "sweep_alpha.toml"),
        ("sweep", "sweep_recoil.toml"),
    ] {
        let out = run(&[sub], &dir.join(name));
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
