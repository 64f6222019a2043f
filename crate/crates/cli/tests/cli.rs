use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use akfit::experiment::MixtureDensity;
use akfit::PiecewiseHypothesis;

fn akfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_akfit")).args(args).output().expect("binary runs")
}

fn write_samples(path: &Path, xs: &[f64]) {
    let text: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    fs::write(path, text.join("\n")).unwrap();
}

#[test]
fn fit_then_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("xs.txt");
    let hyp = dir.path().join("h.json");
    write_samples(&samples, &MixtureDensity::gmm().sample(20_000, 3));

    let out = akfit(&["fit", samples.to_str().unwrap(), "--pieces", "40", "--degree", "1", "-o", hyp.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = PiecewiseHypothesis::from_json(&fs::read_to_string(&hyp).unwrap()).unwrap();
    assert!(!h.is_empty() && h.len() <= 40);
    assert_eq!(h.degree, 1);

    let out = akfit(&["eval", hyp.to_str().unwrap(), "--density", "gmm"]);
    assert!(out.status.success());
    let l1: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!(l1 > 0.0 && l1 < 0.2, "l1 = {l1}");
}

#[test]
fn histogram_to_stdout_with_explicit_domain() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("xs.txt");
    write_samples(&samples, &MixtureDensity::uniform(0.0, 1.0).sample(5_000, 1));
    let out = akfit(&["fit", samples.to_str().unwrap(), "--pieces", "16", "--domain", "-1", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h = PiecewiseHypothesis::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!((h.domain.left, h.domain.right), (-1.0, 2.0));
    assert!((h.total_mass() - 1.0).abs() < 1e-9);
}

#[test]
fn discrete_fit_emits_pmf_pieces() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("xs.txt");
    let xs: Vec<f64> = (0..3000).map(|i| (1 + (i * 7919) % 50) as f64).collect();
    write_samples(&samples, &xs);
    let out = akfit(&["fit", samples.to_str().unwrap(), "--discrete", "50", "--pieces", "16", "--degree", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_max"], 50);
    assert!(!v["pieces"].as_array().unwrap().is_empty());
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    let csv = dir.path().join("out.csv");
    fs::write(&cfg, "density = \"beta\"\npieces = 16\ndegree = 0\ngrid = [1000, 2000]\ntrials = 2\n").unwrap();
    let out = akfit(&["sweep", cfg.to_str().unwrap(), "-o", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,seed,pieces,degree,fit_ms,l1_error");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1000,0,") && lines[4].starts_with("2000,1,"));
}

#[test]
fn eval_accepts_mixture_file() {
    let dir = tempfile::tempdir().unwrap();
    let hyp = dir.path().join("h.json");
    let mix = dir.path().join("mix.json");
    fs::write(
        &hyp,
        r#"{"domain":[0,1],"degree":0,"pieces":[{"left":0,"right":1,"left_closed":true,"right_closed":true,"coeffs":[1]}]}"#,
    )
    .unwrap();
    fs::write(&mix, r#"{"components":[{"weight":1,"family":"uniform","low":0,"high":0.5}]}"#).unwrap();
    let out = akfit(&["eval", hyp.to_str().unwrap(), "--density", mix.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let l1: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((l1 - 1.0).abs() < 1e-6);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "density = \"gmm\"\npieces = 8\ndegree = 0\ngrid = []\n").unwrap();
    assert_eq!(akfit(&["sweep", cfg.to_str().unwrap()]).status.code(), Some(2));

    fs::write(&cfg, "density = [").unwrap();
    assert_eq!(akfit(&["sweep", cfg.to_str().unwrap()]).status.code(), Some(2));

    let samples = dir.path().join("xs.txt");
    write_samples(&samples, &[0.1, 0.2, 0.3]);
    assert_eq!(akfit(&["fit", samples.to_str().unwrap(), "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(akfit(&["fit", samples.to_str().unwrap(), "--discrete", "5"]).status.code(), Some(2));
    assert_eq!(akfit(&["eval", samples.to_str().unwrap(), "--density", "nonesuch"]).status.code(), Some(2));
    assert_eq!(akfit(&["fit", samples.to_str().unwrap(), "--bogus"]).status.code(), Some(2));
}
