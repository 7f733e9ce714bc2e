use std::path::Path;
use std::process::{Command, Output};

use tflattice::frame::read_coeff_json;
use tflattice::signals::read_signal_csv;
use tflattice::verify::non_radius_diffs;
use tflattice::LATTICE_STEP;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tflattice"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report_value(o: &Output, key: &str) -> f64 {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or_else(|| panic!("no `{key}` in {}", stdout(o)))
}

#[test]
fn alpha_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["alpha", "--count", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let published = [0.501052, 0.375586, 0.312961, 0.273833, 0.246446, 0.225907];
    let values: Vec<f64> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 6);
    for (v, p) in values.iter().zip(published) {
        assert!((v - p).abs() < 2e-6);
    }

    let o = run(dir.path(), &["alpha", "--count", "6", "--json"]);
    let parsed: Vec<f64> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(serde_json::to_string(&parsed).unwrap(), stdout(&o).trim());
    for (a, b) in parsed.iter().zip(&values) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["alpha", "--count", "0"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["alpha"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    let o = run(dir.path(), &["analyze", "--signal", "hermite:x", "-o", "x.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("hermite:x"));
}

#[test]
fn analyze_reports_energy_and_embeds_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["analyze", "--signal", "gaussian", "-M", "8", "-N", "8", "-o", "g.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!((report_value(&o, "energy") - 1.0).abs() < 1e-6);

    let file = read_coeff_json(dir.path().join("g.json")).unwrap();
    let meta = file.metadata.unwrap();
    assert!(meta["command"].as_str().unwrap().contains("analyze --signal gaussian"));
    assert_eq!(meta["config"]["n_terms"], 8);
    assert_eq!(meta["signal"], "gaussian");

    let o = run(dir.path(), &["analyze", "--signal", "monocycle", "-M", "4", "-N", "4", "-o", "m.json"]);
    assert!(report_value(&o, "|f_00|") < 1e-12);
}

#[test]
fn missing_input_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["analyze", "--signal", "file:missing.csv", "-o", "x.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.csv"));
    let o = run(dir.path(), &["synthesize", "--coeffs", "nope.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn synthesize_round_trip_matches_fresh_samples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["analyze", "--signal", "gaussian", "-o", "g.json"]);
    let o = run(d, &["synthesize", "--coeffs", "g.json", "-o", "rebuilt.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    run(d, &["generate", "--signal", "gaussian", "-o", "fresh.csv"]);
    let rebuilt = read_signal_csv(d.join("rebuilt.csv")).unwrap();
    let fresh = read_signal_csv(d.join("fresh.csv")).unwrap();
    assert!(rebuilt.distance(&fresh).unwrap() < 1e-6);
    let text = std::fs::read_to_string(d.join("rebuilt.csv")).unwrap();
    assert!(text.starts_with("# command: "));
}

#[test]
fn zero_and_truncated_coefficient_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let rows: Vec<String> = (-1..=1)
        .flat_map(|m| (-1..=1).map(move |n| format!(r#"{{"m":{m},"n":{n},"re":0,"im":0}}"#)))
        .collect();
    let doc = |rows: &[String]| {
        format!(
            r#"{{"M":1,"N":1,"lattice_step":1.7724538509055159,"coefficients":[{}]}}"#,
            rows.join(",")
        )
    };
    std::fs::write(d.join("zero.json"), doc(&rows)).unwrap();
    let o = run(d, &["synthesize", "--coeffs", "zero.json", "-o", "zero.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read_signal_csv(d.join("zero.csv")).unwrap().max_abs(), 0.0);

    std::fs::write(d.join("short.json"), doc(&rows[..7])).unwrap();
    let o = run(d, &["synthesize", "--coeffs", "short.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("expected 9 coefficient rows"), "{}", stderr(&o));
}

#[test]
fn plots_are_deterministic_and_magnify_only_radii() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["analyze", "--signal", "diff:atom,gaussian", "-M", "4", "-N", "4", "-o", "diff.json"]);
    // Identical command lines, so the embedded provenance matches too.
    let plot = |magnify: &str| {
        let o = run(d, &["plot", "--coeffs", "diff.json", "--magnify", magnify]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o)
    };
    let (a, b, c) = (plot("1"), plot("1"), plot("30"));
    assert_eq!(a, b);
    assert_eq!(non_radius_diffs(&a, &c), 0);
    assert_ne!(a, c);
    assert!(a.contains("<!-- command: "));
    let read = |n: &str| std::fs::read_to_string(d.join(n)).unwrap();

    let o = run(d, &["plot", "--attenuation", "--overlay", "gaussian,approx3,approx5", "-o", "att.svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = read("att.svg");
    assert_eq!(svg.matches("stroke-dasharray=\"6 4\" points=").count(), 3);
    let o = run(d, &["plot", "--attenuation", "--overlay", "sinc"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ambiguity_and_estimate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["ambiguity", "--xi", "0", "--eta", "0", "-o", "zero.json"]);
    run(d, &["analyze", "--signal", "atom", "-o", "atom.json"]);
    let (amb, atom) = (
        read_coeff_json(d.join("zero.json")).unwrap(),
        read_coeff_json(d.join("atom.json")).unwrap(),
    );
    for (a, b) in amb.grid.values().iter().zip(atom.grid.values()) {
        assert!((a - b).norm() < 1e-12);
    }

    let o = run(d, &["ambiguity", "--xi", "0.655", "--eta", "-1.08", "-o", "shifted.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let meta = read_coeff_json(d.join("shifted.json")).unwrap().metadata.unwrap();
    let snapped = meta["xi"].as_f64().unwrap();
    assert_eq!(meta["xi_requested"].as_f64().unwrap(), 0.655);
    assert_eq!(snapped, 24.0 * LATTICE_STEP / 64.0);

    let o = run(d, &["ambiguity", "--estimate", "--coeffs", "shifted.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!((report_value(&o, "xi") - snapped).abs() < 1e-3);
    assert!((report_value(&o, "eta") + 1.08).abs() < 1e-3);
    assert!(report_value(&o, "score") > 1.0 - 1e-6);
}

#[test]
fn flat_correlation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["analyze", "--signal", "hermite:4", "-o", "h.json"]);
    let o = run(d, &["ambiguity", "--estimate", "--coeffs", "h.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("flat correlation"));
}

#[test]
fn verify_passes_lists_and_fails_on_demand() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 12);

    let o = run(dir.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("12 of 12 checks passed"));

    // The worst measured energy error is ~1e-14, so this bound cannot hold.
    let o = run(dir.path(), &["verify", "--tol-energy", "1e-15"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).lines().any(|l| l.contains("energy") && l.contains("FAIL")));
}

#[test]
fn waveform_table_has_header_and_peak() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["waveform", "--t-min", "-1", "--t-max", "1", "--dt", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,value");
    assert_eq!(rows.len(), 6);
    let centre: f64 = rows[3].split(',').nth(1).unwrap().parse().unwrap();
    assert!((centre - 0.721582349).abs() < 1e-6);

    let o = run(dir.path(), &["waveform", "--attenuation", "--t-min", "0", "--t-max", "0"]);
    assert!(stdout(&o).contains("t,db\n0,0\n"));
}
