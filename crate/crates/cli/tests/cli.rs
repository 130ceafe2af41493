use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fpulab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpulab")).args(args).output().expect("spawn fpulab")
}

fn simulate(out: &Path, extra: &[&str]) -> Output {
    let dir = out.to_str().unwrap();
    let mut args = vec!["simulate", "--n", "16", "--beta", "1", "--energy", "8", "--steps", "200", "--sample-every", "10"];
    args.extend_from_slice(&["--warmup", "100", "--seed", "3", "--out", dir]);
    args.extend_from_slice(extra);
    fpulab(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn simulate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(simulate(&a, &[]).status.success());
    assert!(simulate(&b, &[]).status.success());
    let sa = fs::read(a.join("series.bin")).unwrap();
    let sb = fs::read(b.join("series.bin")).unwrap();
    assert_eq!(sa.len(), 21 * 2 * 16 * 8);
    assert_eq!(sa, sb);
    assert!(!a.join("run.lock").exists());

    let m: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["samples"], 21);
    assert_eq!(m["schema_version"], 1);
    assert!((m["horizon"].as_f64().unwrap() - 20.0 * 10.0 * 0.01).abs() < 1e-12);
}

#[test]
fn zero_steps_writes_single_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    let o = fpulab(&["simulate", "--n", "8", "--beta", "0.5", "--energy", "4", "--steps", "0", "--warmup", "0", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::metadata(dir.join("series.bin")).unwrap().len(), 2 * 8 * 8);
}

#[test]
fn steps_must_be_multiple_of_sample_every() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    let o = fpulab(&["simulate", "--steps", "15", "--sample-every", "10", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn existing_run_needs_force() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    assert!(simulate(&dir, &[]).status.success());
    assert_eq!(simulate(&dir, &[]).status.code(), Some(2));
    assert!(simulate(&dir, &["--force"]).status.success());
}

#[test]
fn held_lock_blocks_writer() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("run.lock"), "1\n").unwrap();
    let o = simulate(&dir, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("locked"));
}

fn edit_manifest(dir: &Path, f: impl FnOnce(&mut serde_json::Value)) {
    let path = dir.join("manifest.json");
    let mut m: serde_json::Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    f(&mut m);
    fs::write(&path, serde_json::to_string_pretty(&m).unwrap()).unwrap();
}

fn spectrum_of(dir: &Path, out: &Path) -> Output {
    fpulab(&["spectrum", "--run", dir.to_str().unwrap(), "--segments", "2", "--pad", "1", "--out", out.to_str().unwrap()])
}

#[test]
fn schema_mismatch_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    assert!(simulate(&dir, &[]).status.success());
    edit_manifest(&dir, |m| m["schema_version"] = 99.into());
    let o = spectrum_of(&dir, &tmp.path().join("s"));
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("schema_version"));
}

#[test]
fn unknown_manifest_field_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    assert!(simulate(&dir, &[]).status.success());
    edit_manifest(&dir, |m| m["colour"] = "blue".into());
    assert_eq!(spectrum_of(&dir, &tmp.path().join("s")).status.code(), Some(5));
}

#[test]
fn truncated_series_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    assert!(simulate(&dir, &[]).status.success());
    let bytes = fs::read(dir.join("series.bin")).unwrap();
    fs::write(dir.join("series.bin"), &bytes[..bytes.len() - 8]).unwrap();
    assert_eq!(spectrum_of(&dir, &tmp.path().join("s")).status.code(), Some(5));
}

#[test]
fn spectrum_csv_uses_lf() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    assert!(simulate(&dir, &[]).status.success());
    let out = tmp.path().join("s");
    let o = spectrum_of(&dir, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(text.starts_with("k,omega,power\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn thermo_reports_reference_eta() {
    let o = fpulab(&["thermo", "--beta", "0.5", "--edensity", "0.390625"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let eta = v["eta"].as_f64().unwrap();
    assert!((eta - 1.1812).abs() < 2e-3, "eta = {eta}");
    assert!(v["theta"].as_f64().unwrap() > 0.0);
}

#[test]
fn thermo_rejects_negative_edensity() {
    assert_eq!(fpulab(&["thermo", "--beta", "0.5", "--edensity", "-1"]).status.code(), Some(2));
}

#[test]
fn logistic_at_full_chaos() {
    let o = fpulab(&["logistic", "--lambda", "1", "--iters", "200000"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["h"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 0.01);
}

#[test]
fn linewidth_writes_tau_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let o = fpulab(&["linewidth", "--n", "32", "--k", "4,8", "--umklapp", "both", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("linewidth.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,omega_tilde,tau_on,ratio_on,tau_off,ratio_off");
    assert_eq!(lines.len(), 3);
}

#[test]
fn resonances_match_half_period_families() {
    let tmp = tempfile::tempdir().unwrap();
    let o = fpulab(&["resonances", "--n", "16", "--k", "3", "--out", tmp.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["families_match"], true);
    assert_eq!(v["three_to_one_exact"], 0);
    assert!(tmp.path().join("resonance_curves.csv").exists());
}

#[test]
fn analysis_output_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("r");
    assert!(simulate(&dir, &[]).status.success());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(spectrum_of(&dir, &a).status.success());
    assert!(spectrum_of(&dir, &b).status.success());
    assert_eq!(fs::read(a.join("spectrum.csv")).unwrap(), fs::read(b.join("spectrum.csv")).unwrap());
    assert_eq!(fs::read(a.join("spectrum.json")).unwrap(), fs::read(b.join("spectrum.json")).unwrap());
}
