use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lcsense::extraction::CapacitorModel;
use lcsense::rfnet::FrequencyGrid;
use lcsense::touchstone::{self, DataFormat, TouchstoneDocument};
use tempfile::TempDir;

fn lcsense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcsense"))
        .args(args)
        .output()
        .unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const SYSTEM: &str = r#"
k = 0.0
port_impedance = 10.0
temperatures = [20.0, 60.0]

[reader]
inductance = 8.35e-6
resistance = 2.0
series_capacitance = 66e-12

[sensor]
inductance = 8.35e-6
resistance = 2.0

[sensor.capacitor]
kind = "fixed"
capacitance = 45.8e-12

[grid]
start = 4e6
stop = 10e6
points = 1001
"#;

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("system.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn csv_rows(s: &str) -> Vec<Vec<String>> {
    s.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(lcsense(&[]).status.code(), Some(64));
    assert_eq!(lcsense(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(lcsense(&["extract"]).status.code(), Some(64));
    assert_eq!(lcsense(&["report"]).status.code(), Some(64));
    assert_eq!(
        lcsense(&["extract", "x.s1p", "--band", "9:1"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(lcsense(&["--help"]).status.code(), Some(0));
}

#[test]
fn extract_reports_capacitance_and_flags_bad_files() {
    let dir = TempDir::new().unwrap();
    let grid = FrequencyGrid::linspace(10e6, 600e6, 1181).unwrap();
    let model = CapacitorModel::new(35e-12, 0.5, 8.97e-9, None).unwrap();
    let doc = TouchstoneDocument::from_one_port(&model.sweep(&grid, 50.0).unwrap(), vec![]);
    let good = dir.path().join("cap.s1p");
    std::fs::write(&good, touchstone::write(&doc, DataFormat::Ma)).unwrap();
    let bad = dir.path().join("bad.s1p");
    std::fs::write(&bad, "# MHZ S RI R 50\n1 0 0\n2 0 oops\n").unwrap();

    let out = lcsense(&["extract", p(&good), "--band", "10e6:20e6", "--area", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let rows = csv_rows(&text(&out.stdout));
    assert_eq!(rows[0].last().unwrap(), "status");
    assert_eq!(rows[0].len(), 8);
    let c_pf: f64 = rows[1][1].parse().unwrap();
    assert!((c_pf / 35.0 - 1.0).abs() < 0.01, "{c_pf}");
    let srf: f64 = rows[1][3].parse().unwrap();
    assert!((srf - 284.0).abs() <= 0.5, "{srf}");
    let per_area: f64 = rows[1][5].parse().unwrap();
    assert!((per_area - c_pf / 2.0).abs() < 1e-6);

    let out = lcsense(&["extract", p(&good), p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let rows = csv_rows(&text(&out.stdout));
    assert_eq!(rows[1].last().unwrap(), "bad_band");
    assert_eq!(rows[2].last().unwrap(), "parse_error");
    assert!(
        text(&out.stderr).contains("line 3"),
        "{}",
        text(&out.stderr)
    );

    let out = lcsense(&[
        "extract",
        p(&good),
        "--band",
        "10e6:20e6",
        "--out",
        p(&dir.path().join("o.csv")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn simulate_is_deterministic_and_isolated_at_zero_coupling() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), SYSTEM);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let r = lcsense(&[
            "simulate",
            p(&config),
            "--out-dir",
            p(out),
            "--format",
            "csv",
        ]);
        assert_eq!(r.status.code(), Some(0), "{}", text(&r.stderr));
    }
    for name in ["sweep_T20.csv", "sweep_T60.csv", "summary.csv"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    // A fixed capacitor does not move with temperature.
    assert_eq!(
        std::fs::read(a.join("sweep_T20.csv")).unwrap(),
        std::fs::read(a.join("sweep_T60.csv")).unwrap()
    );

    let sweep = csv_rows(&text(&std::fs::read(a.join("sweep_T20.csv")).unwrap()));
    assert_eq!(sweep[0], ["f_hz", "s11_db", "s22_db", "s21_db"]);
    for row in &sweep[1..] {
        let s21: f64 = row[3].parse().unwrap();
        assert!(s21 <= -300.0, "{s21}");
    }
    let summary = csv_rows(&text(&std::fs::read(a.join("summary.csv")).unwrap()));
    let dip: f64 = summary[1][1].parse().unwrap();
    assert!((dip - 6.78e6).abs() <= 6e3, "{dip}");
    assert_eq!(summary[1][3], "1");
}

#[test]
fn simulate_writes_touchstone_that_parses_back() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), SYSTEM);
    let out = dir.path().join("out");
    let r = lcsense(&["simulate", p(&config), "--out-dir", p(&out)]);
    assert_eq!(r.status.code(), Some(0));
    let bytes = std::fs::read(out.join("sweep_T20.s2p")).unwrap();
    let two = touchstone::parse_with_ports(&bytes, Some(2))
        .unwrap()
        .to_two_port()
        .unwrap();
    assert_eq!(two.grid().len(), 1001);
    assert_eq!(two.reference_impedance(), 10.0);
}

#[test]
fn simulate_rejects_bad_config_with_key_path() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        &SYSTEM.replace("[grid]\n", "[grid]\nstep = 3\n"),
    );
    let r = lcsense(&["simulate", p(&config), "--out-dir", p(dir.path())]);
    assert_eq!(r.status.code(), Some(65));
    let err = text(&r.stderr);
    assert!(err.contains("grid") && err.contains("step"), "{err}");
}

#[test]
fn off_tuned_example_calibrates_and_inverts() {
    let dir = TempDir::new().unwrap();
    let r = lcsense(&[
        "simulate",
        &data("offtuned.toml"),
        "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", text(&r.stderr));
    let curve = dir.path().join("curve.csv");
    let r = lcsense(&[
        "calibrate",
        p(&dir.path().join("summary.csv")),
        "--column",
        "reader_dip_hz",
        "--out",
        p(&curve),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", text(&r.stderr));
    let rows = csv_rows(&std::fs::read_to_string(&curve).unwrap());
    assert_eq!(rows.len(), 11);
    let knot_f = rows[5][1].clone();
    let knot_t: f64 = rows[5][0].parse().unwrap();

    let r = lcsense(&["invert", p(&curve), &knot_f, "1e3", "--mode", "strict"]);
    assert_eq!(r.status.code(), Some(2));
    let out = csv_rows(&text(&r.stdout));
    let t: f64 = out[1][1].parse().unwrap();
    assert!((t - knot_t).abs() < 1e-6, "{t}");
    assert_eq!(out[2][1], "");

    let r = lcsense(&["invert", p(&curve), "1e3"]);
    assert_eq!(r.status.code(), Some(0));
    let out = csv_rows(&text(&r.stdout));
    assert_eq!(out[1][1].parse::<f64>().unwrap(), 20.0);

    let r = lcsense(&["report", "--curve", p(&curve)]);
    assert_eq!(r.status.code(), Some(0));
    assert!(text(&r.stdout).contains("\"direction\": \"increase\""));
}

#[test]
fn fit_reads_csv_and_reports_line_of_bad_rows() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("c.csv");
    let mut body = String::from("temperature_c,capacitance_f\n");
    for i in 0..10 {
        let t = 20.0 + 10.0 * i as f64;
        let c = 35e-12 * (1.0 - 0.6 * (1.0 - (-(t - 20.0) / 30.0f64).exp()));
        body.push_str(&format!("{t},{c:e}\n"));
    }
    std::fs::write(&input, &body).unwrap();
    let r = lcsense(&[
        "fit",
        p(&input),
        "--kind",
        "exp-decay",
        "--frequency-tag",
        "1e6",
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", text(&r.stderr));
    let json: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(json["kind"], "exp_decay");
    let rr = json["model"]["law"]["rr_max"].as_f64().unwrap();
    assert!((rr - 0.6).abs() < 1e-4, "{rr}");
    assert_eq!(json["model"]["frequency_tag"].as_f64(), Some(1e6));

    // The fit output is accepted as a model file by the simulator config.
    let model_path = dir.path().join("model.json");
    std::fs::write(&model_path, &r.stdout).unwrap();
    let config = SYSTEM.replace(
        "kind = \"fixed\"\ncapacitance = 45.8e-12",
        "kind = \"model\"\npath = \"model.json\"",
    );
    let config = write_config(dir.path(), &config);
    let r = lcsense(&[
        "simulate",
        p(&config),
        "--out-dir",
        p(&dir.path().join("sim")),
    ]);
    assert_eq!(r.status.code(), Some(0), "{}", text(&r.stderr));

    std::fs::write(
        &input,
        "temperature_c,capacitance_f\n20,1e-11\n30,1e-11\n40,abc\n",
    )
    .unwrap();
    let r = lcsense(&["fit", p(&input)]);
    assert_eq!(r.status.code(), Some(65));
    assert!(text(&r.stderr).contains("line 4"), "{}", text(&r.stderr));
}

#[test]
fn report_flags_inconsistent_comparison_rows() {
    let r = lcsense(&["report", "--compare", &data("sensitivity_comparison.csv")]);
    assert_eq!(r.status.code(), Some(0), "{}", text(&r.stderr));
    let json: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    let rows = json["comparison"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    let s1 = &rows[0];
    assert_eq!(s1["reference"], "S1");
    assert!((s1["recomputed_pct_per_degc"].as_f64().unwrap() - 0.0105).abs() < 5e-5);
    assert_eq!(s1["flagged"], false);
    let flagged: Vec<&str> = json["comparison"]["flagged"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(flagged, ["S3", "S5", "S11", "S12", "S13", "S14"]);
}

#[test]
fn report_capacitance_span() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("c.csv");
    std::fs::write(
        &input,
        "temperature_c,capacitance_f\n20,10e-12\n50,7e-12\n110,5e-12\n",
    )
    .unwrap();
    let r = lcsense(&["report", "--capacitance", p(&input), "--span", "20:50"]);
    assert_eq!(r.status.code(), Some(0), "{}", text(&r.stderr));
    let json: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    let cap = &json["capacitance"];
    assert!((cap["relative_response"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert!((cap["sensitivity_pct_per_degc"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(cap["direction"], "decrease");
    let r = lcsense(&["report", "--capacitance", p(&input), "--span", "0:50"]);
    assert_eq!(r.status.code(), Some(2));
}
