use std::path::Path;
use std::process::{Command as Process, Output};

use mzi_modes::cli::{execute, run, Command, Format, Output as CliOutput, ScenarioConfig};
use mzi_modes::estimation::ingest_events;
use serde_json::Value;

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_mzi-modes"))
}

fn invoke(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&invoke(&all))).unwrap()
}

fn simulate(path: &Path, seed: &str) {
    stdout(&invoke(&["simulate", "--seed", seed, "--out", path.to_str().unwrap()]));
}

#[test]
fn ideal_fringes_vanish_at_dark_fringe() {
    let rows = json(&["fringes", "-p", "visibility=1", "-p", "overlap=1", "-p", "theta=pi/2"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["p_c"].as_f64().unwrap().abs() < 1e-15);
    assert!((rows[0]["p_d"].as_f64().unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn enhancement_rows() {
    let rows = json(&["enhancement", "-p", "mode=fixed", "-p", "v_min=0.93", "-p", "v_max=1", "-p", "v_points=2"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2 * 37);
    for r in rows.iter().filter(|r| r["visibility"] == 1.0) {
        assert!((r["epsilon"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }
    let dark = rows
        .iter()
        .find(|r| r["visibility"] == 0.93 && (r["theta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12)
        .unwrap();
    assert_eq!(dark["epsilon"], "inf");
}

#[test]
fn csv_header_and_row_count() {
    let text = stdout(&invoke(&["qfi", "-p", "theta_points=5"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("theta,"));
}

#[test]
fn three_photon_ideal_fisher_is_seven() {
    let rows = json(&["three-photon", "-p", "visibility=1", "-p", "d=0 sigma", "-p", "theta=1.1"]);
    assert!((rows[0]["F3"].as_f64().unwrap() - 7.0).abs() < 1e-6);
}

#[test]
fn simulation_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    simulate(&a, "42");
    let out = bin()
        .env("RAYON_NUM_THREADS", "3")
        .args(["simulate", "--seed", "42", "--out", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let (a_bytes, b_bytes) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a_bytes, b_bytes);

    let file = ingest_events(&a).unwrap();
    assert_eq!(file.events.len(), 6000);
    assert_eq!(file.metadata["seed"], "42");

    simulate(&b, "43");
    assert_ne!(a_bytes, std::fs::read(&b).unwrap());
}

#[test]
fn estimate_reproduces_sub_shot_noise_report() {
    let dir = tempfile::tempdir().unwrap();
    let events = dir.path().join("events.csv");
    simulate(&events, "42");
    let input = format!("input={}", events.display());
    let report = json(&["estimate", "-p", &input]);
    assert_eq!(report["n_events"], 6000);
    assert_eq!(report["n_subsets"], 600);
    assert!(report["epsilon"].as_f64().unwrap() < 1.0);
    assert_eq!(report["config"]["d_over_sigma"].as_f64().unwrap(), 1.64);
    for key in ["F_c", "F_pair", "F_Q"] {
        assert!(report["fisher_refs"][key].is_number(), "{key}");
    }
    assert_eq!(report, json(&["estimate", "-p", &input]));

    let fit = json(&["mlfit", "-p", &input]);
    assert!((fit[0]["theta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 0.06);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    std::fs::write(&cfg, "# dark fringe\nsigma = 122 um\nd = 200 um\ntheta = 90 deg\nvisibility = 0.93\n").unwrap();
    let rows = json(&["spatial-fisher", "--config", cfg.to_str().unwrap()]);
    let f = rows[0]["F_spatial"].as_f64().unwrap();
    assert!(f > 2.0 && f < rows[0]["F_Q"].as_f64().unwrap());
    let rows = json(&["spatial-fisher", "--config", cfg.to_str().unwrap(), "-p", "visibility=1"]);
    assert!(rows[0]["F_spatial"].as_f64().unwrap() > f);
}

#[test]
fn exit_codes() {
    assert_eq!(invoke(&["fringes", "-p", "bogus=1"]).status.code(), Some(2));
    assert_eq!(invoke(&["fringes", "-p", "visibility=1.5"]).status.code(), Some(2));
    assert_eq!(invoke(&["fringes", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(invoke(&["nonsense"]).status.code(), Some(2));
    assert_eq!(invoke(&["spatial-fisher", "-p", "d=1.64"]).status.code(), Some(2));
    assert_eq!(invoke(&["estimate", "-p", "input=/nonexistent.csv"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "kind,x_um,xprime_um\nc,1,2\n").unwrap();
    let out = invoke(&["estimate", "-p", &format!("input={}", bad.display())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("header"));

    assert_eq!(invoke(&["--help"]).status.code(), Some(0));
}

#[test]
fn library_entry_point_matches_binary() {
    let mut cfg = ScenarioConfig::default();
    cfg.set("theta_points", "4").unwrap();
    let mut buf = Vec::new();
    run(Command::Fringes, &cfg, Format::Csv, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), stdout(&invoke(&["fringes", "-p", "theta_points=4"])));

    cfg.set("seed", "7").unwrap();
    assert!(execute(Command::Simulate, &cfg).is_err());
    let mut cfg = ScenarioConfig::default();
    cfg.set("events", "50").unwrap();
    match execute(Command::Simulate, &cfg).unwrap() {
        CliOutput::Events { events, .. } => assert_eq!(events.len(), 50),
        _ => panic!("simulate returns events"),
    }
}
