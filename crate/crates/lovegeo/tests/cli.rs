use std::path::Path;
use std::process::{Command, Output};

use lovegeo::commands::model_end_samples;
use lovegeo::config::{ConfigLayer, OutputFormat, RunConfig};
use lovegeo::io::{render_samples, GridFile};
use lovegeo::RunReport;
use lovegeo_core::graphgeom::GridGraph;
use serde_json::Value;
use tempfile::TempDir;

fn lovegeo(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lovegeo"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("LOVEGEO_OUT")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> RunReport {
    serde_json::from_slice(&out.stdout).expect("stdout carries a run report")
}

fn verdict<'a>(r: &'a RunReport, check: &str) -> &'a lovegeo::Verdict {
    r.verdicts.iter().find(|v| v.check == check).unwrap_or_else(|| panic!("no verdict {check}"))
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let mut rd = csv::Reader::from_path(path).unwrap();
    let idx = rd.headers().unwrap().iter().position(|h| h == name).unwrap();
    rd.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

fn config(n: usize, k: usize, m: f64, dir: &Path) -> RunConfig {
    let layer = ConfigLayer { n: Some(n), k: Some(k), m: Some(m), out_dir: Some(dir.into()), ..Default::default() };
    RunConfig::resolve(layer, None, None).unwrap()
}

#[test]
fn profile_writes_small_residuals() {
    let dir = TempDir::new().unwrap();
    let out = lovegeo(&["profile", "--n", "5", "--k", "2", "--m", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let residual = csv_column(&dir.path().join("profile.csv"), "sigma2k_residual");
    assert!(residual.len() > 10);
    assert!(residual.iter().all(|r| r.abs() < 1e-8));
}

#[test]
fn invalid_configuration_exits_two() {
    let dir = TempDir::new().unwrap();
    let out = lovegeo(&["profile", "--n", "5", "--k", "2", "--m", "-1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mass parameter must be positive"));
    let out = lovegeo(&["profile", "--n", "4", "--k", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = lovegeo(&["profile", "--n", "5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_model_profile_passes() {
    let dir = TempDir::new().unwrap();
    let out = lovegeo(&["profile", "--n", "4", "--k", "1", "--m", "0.7"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let input = dir.path().join("profile.csv");
    let out = lovegeo(&["verify", "--n", "4", "--k", "1", "--input", input.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(r.verdicts.len() >= 5);
    assert!(verdict(&r, "regularity_gap").value < 1e-6);
    let bundle: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verdicts.json")).unwrap()).unwrap();
    assert_eq!(bundle["verdicts"].as_array().unwrap().len(), r.verdicts.len());
}

#[test]
fn verify_detects_mismatched_double() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(lovegeo(&["profile", "--n", "3", "--k", "1", "--m", "1"], &a).status.code(), Some(0));
    assert_eq!(lovegeo(&["profile", "--n", "3", "--k", "1", "--m", "2"], &b).status.code(), Some(0));
    let out = lovegeo(
        &[
            "verify",
            "--n",
            "3",
            "--k",
            "1",
            "--input",
            a.join("profile.csv").to_str().unwrap(),
            "--lower",
            b.join("profile.csv").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let gap = verdict(&r, "regularity_gap");
    assert!(!gap.pass && gap.value > 1e-2);
}

#[test]
fn verify_plane_grid_has_no_horizon() {
    let dir = TempDir::new().unwrap();
    let grid = GridGraph::sample(0.5, vec![-2.0; 3], vec![9; 3], |_| 0.0).unwrap();
    let path = dir.path().join("plane.csv");
    std::fs::write(&path, GridFile::from_grid(&grid).render(OutputFormat::Csv)).unwrap();
    let out = lovegeo(&["verify", "--n", "3", "--k", "1", "--input", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(verdict(&r, "sigma2k_residual").pass);
    assert!(!verdict(&r, "horizon_conditions").pass);
}

#[test]
fn model_mass_and_penrose() {
    let dir = TempDir::new().unwrap();
    let out = lovegeo(&["mass", "--n", "3", "--k", "1", "--m", "1", "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("mass.json")).unwrap()).unwrap();
    assert!((v["flux"]["mass"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    let a = v["expansion"]["a"].as_f64().unwrap();
    assert!((0.5 * a * a - 1.0).abs() < 1e-3);

    let out = lovegeo(&["penrose", "--n", "3", "--k", "1", "--m", "1", "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("penrose.json")).unwrap()).unwrap();
    assert!(v["report"]["gap"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn penrose_from_profile_file() {
    let dir = TempDir::new().unwrap();
    assert_eq!(lovegeo(&["profile", "--n", "5", "--k", "1", "--m", "2"], dir.path()).status.code(), Some(0));
    let input = dir.path().join("profile.csv");
    let out = lovegeo(&["penrose", "--n", "5", "--k", "1", "--input", input.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let gap = csv_column(&dir.path().join("penrose.csv"), "gap")[0];
    let mass = csv_column(&dir.path().join("penrose.csv"), "mass")[0];
    assert!((mass - 2.0).abs() < 1e-6 && gap.abs() < 1e-6 * mass);
}

#[test]
fn sweep_spec_gaps_are_nonnegative() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("sweep.toml");
    std::fs::write(
        &spec,
        "[[member]]\nm0 = 1.0\ndelta = 0.0\ncenter = 6.0\nwidth = 1.0\n\n\
         [[member]]\nm0 = 1.0\ndelta = 0.4\ncenter = 6.0\nwidth = 1.0\n\n\
         [[member]]\nm0 = 0.5\ndelta = 1.5\ncenter = 8.0\nwidth = 2.0\n",
    )
    .unwrap();
    let out = lovegeo(&["sweep", "--n", "3", "--k", "1", "--input", spec.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let gaps = csv_column(&dir.path().join("sweep.csv"), "gap");
    let masses = csv_column(&dir.path().join("sweep.csv"), "mass");
    assert_eq!(gaps.len(), 3);
    assert!(gaps.iter().zip(&masses).all(|(g, m)| *g >= -1e-6 * m));
    assert!(gaps[1] > 0.0);

    std::fs::write(&spec, "[[member]]\nm0 = 1.0\ndelta = -0.2\ncenter = 6.0\nwidth = 1.0\n").unwrap();
    let out = lovegeo(&["sweep", "--n", "3", "--k", "1", "--input", spec.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("energy condition"));
}

#[test]
fn empty_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    for cmd in ["mass", "fit", "verify", "penrose"] {
        let out = lovegeo(&[cmd, "--n", "3", "--k", "1", "--input", empty.to_str().unwrap()], dir.path());
        assert_eq!(out.status.code(), Some(2), "{cmd}");
    }
    let out = lovegeo(&["verify", "--n", "3", "--k", "1", "--input", "/nonexistent/file.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ads_table() {
    let dir = TempDir::new().unwrap();
    let out = lovegeo(&["ads", "--n", "3", "--k", "1", "--m", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("ads.csv");
    let r = csv_column(&path, "r");
    let horizon = csv_column(&path, "horizon");
    let slope = csv_column(&path, "slope");
    assert!(horizon.iter().all(|h| (h - 1.0).abs() < 1e-12));
    let i = r.iter().position(|x| (x - 2.0).abs() < 1e-12).unwrap();
    assert!((slope[i] - 0.1).abs() < 1e-12);
    let out = lovegeo(&["ads", "--n", "3", "--k", "1", "--m", "1", "--r-min", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_and_mass_from_samples() {
    let dir = TempDir::new().unwrap();
    let samples = model_end_samples(&config(5, 1, 1.0, dir.path()), 90).unwrap();
    let path = dir.path().join("end.csv");
    std::fs::write(&path, render_samples(&samples)).unwrap();
    let out = lovegeo(&["fit", "--n", "5", "--k", "1", "--input", path.to_str().unwrap(), "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert!((v["a"].as_f64().unwrap() / 2f64.sqrt() - 1.0).abs() < 1e-4);

    let out = lovegeo(&["mass", "--n", "5", "--k", "1", "--input", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let flux_mass = csv_column(&dir.path().join("mass.csv"), "flux_mass")[0];
    assert!((flux_mass - 1.0).abs() < 1e-3);
}

#[test]
fn ill_conditioned_fit_exits_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("flat.csv");
    let mut text = String::from("x1,x2,x3,u\n");
    for _ in 0..40 {
        text.push_str("60,0,0,1\n");
    }
    std::fs::write(&path, text).unwrap();
    let out = lovegeo(&["fit", "--n", "3", "--k", "1", "--input", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("condition"));
}

#[test]
fn outputs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [a.path(), b.path()] {
        for cmd in ["profile", "mass", "sweep"] {
            let out = lovegeo(&[cmd, "--n", "5", "--k", "2", "--m", "0.5", "--members", "3", "--format", "json"], dir);
            assert_eq!(out.status.code(), Some(0), "{cmd}");
        }
    }
    for name in ["profile.json", "mass.json", "sweep.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn config_file_env_and_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 3\nk = 1\nm = 2.0\nformat = \"json\"\n").unwrap();
    let env_dir = dir.path().join("env");
    let out = Command::new(env!("CARGO_BIN_EXE_lovegeo"))
        .args(["penrose", "--config", cfg.to_str().unwrap(), "--m", "0.5"])
        .env("LOVEGEO_OUT", &env_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(env_dir.join("penrose.json")).unwrap()).unwrap();
    assert!((v["report"]["mass"].as_f64().unwrap() - 0.5).abs() < 1e-6);

    std::fs::write(&cfg, "n = 3\nk = 1\nbogus = 1\n").unwrap();
    let out = lovegeo(&["profile", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
