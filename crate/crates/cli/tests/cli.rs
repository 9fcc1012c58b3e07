//! End-to-end runs of the `aeris` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

fn default_text() -> String {
    std::fs::read_to_string(scenario_path("default.toml")).unwrap()
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

struct Run {
    code: i32,
    stderr: String,
    out: tempfile::TempDir,
}

fn run(text: &str, args: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.toml");
    std::fs::write(&path, text).unwrap();
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_aeris"))
        .args(args)
        .arg("--scenario")
        .arg(&path)
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    Run {
        code: o.status.code().unwrap(),
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
        out,
    }
}

fn files(dir: &Path) -> usize {
    std::fs::read_dir(dir).unwrap().count()
}

fn assert_schema_error(text: &str, args: &[&str], needle: &str) {
    let r = run(text, args);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stderr.contains(needle), "stderr: {}", r.stderr);
    assert_eq!(files(r.out.path()), 0);
}

#[test]
fn malformed_unit_is_a_schema_error() {
    let text = default_text().replace("height = \"350 m\"", "height = 350");
    assert_schema_error(&text, &["metrics"], "no unit annotation");
    let text = default_text().replace("height = \"350 m\"", "height = \"350 W\"");
    assert_schema_error(&text, &["metrics"], "not a length unit");
}

#[test]
fn unknown_key_is_a_schema_error() {
    let text = default_text().replace("[irs]\n", "[irs]\ncolour = \"blue\"\n");
    assert_schema_error(&text, &["metrics"], "unknown field");
}

#[test]
fn unsupported_schema_version_is_rejected() {
    let text = default_text().replace("schema_version = 1", "schema_version = 7");
    assert_schema_error(&text, &["metrics"], "schema_version 7");
}

#[test]
fn ambiguous_radio_section_is_rejected() {
    let text = default_text().replace(
        "snr_threshold = \"8 dB\"",
        "snr_threshold = \"8 dB\"\ntarget_rate = \"1 Mbps\"",
    );
    assert_schema_error(&text, &["metrics"], "exactly one of");
}

#[test]
fn bad_grid_and_trial_overrides_are_rejected() {
    assert_schema_error(&default_text(), &["metrics", "--grid", "altitude=1:2:1"], "altitude");
    assert_schema_error(&default_text(), &["metrics", "--grid", "height=500:100:10"], "height");
    assert_schema_error(&default_text(), &["simulate", "--trials", "10"], "trials");
}

#[test]
fn optimizer_below_clt_floor_is_infeasible() {
    let text = default_text().replace("n_min = 20", "n_min = 5");
    let r = run(&text, &["optimize"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert_eq!(files(r.out.path()), 0);
}

#[test]
fn irs_outage_falls_with_element_count() {
    let r = run(&default_text(), &["metrics", "--grid", "elements=20:400:20"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut reader = csv::Reader::from_path(r.out.path().join("metrics.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (mode, outage, prov, version) = (col("mode"), col("outage"), col("provenance"), col("version"));
    let mut last = f64::INFINITY;
    let mut seen = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        assert_eq!(&rec[version], env!("CARGO_PKG_VERSION"));
        assert!(matches!(&rec[prov], "closed_form" | "bound"));
        if &rec[mode] == "irs" && &rec[prov] == "closed_form" {
            let o: f64 = rec[outage].parse().unwrap();
            assert!(o <= last, "{o} after {last}");
            last = o;
            seen += 1;
        }
    }
    assert_eq!(seen, 20);
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(r.out.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 20);
}

#[test]
fn every_command_runs_on_the_shipped_scenarios() {
    for (name, command) in [
        ("irs-altitude.toml", "optimize"),
        ("uav-altitude.toml", "optimize"),
        ("mode-crossover.toml", "select"),
        ("element-sweep.toml", "optimize"),
    ] {
        let text = std::fs::read_to_string(scenario_path(name)).unwrap();
        let r = run(&text, &[command]);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        assert_eq!(files(r.out.path()), 2);
    }
    let r = run(&default_text(), &["simulate", "--trials", "20000"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn simulate_is_reproducible() {
    let a = run(&default_text(), &["simulate", "--trials", "20000", "--seed", "3"]);
    let b = run(&default_text(), &["simulate", "--trials", "20000", "--seed", "3"]);
    for f in ["simulate.csv", "simulate.json"] {
        assert_eq!(
            std::fs::read(a.out.path().join(f)).unwrap(),
            std::fs::read(b.out.path().join(f)).unwrap()
        );
    }
}
