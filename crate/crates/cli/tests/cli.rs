use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn quench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quench"))
        .args(args)
        .env("QUENCH_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

/// Name and bytes of every data file, manifests excluded.
fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with("_manifest.json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn run_twice(args: &[&str]) -> (Vec<(String, Vec<u8>)>, Vec<(String, Vec<u8>)>) {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(quench(a.path(), args).status.success());
    assert!(quench(b.path(), args).status.success());
    (data_files(a.path()), data_files(b.path()))
}

#[test]
fn outputs_are_bit_identical_across_runs() {
    for args in [
        &["front", "--c", "1.2", "--eps", "0.005"][..],
        &["painleve", "--classify", "0.5,1.5"],
        &["delay-sweep", "--fold", "--eps-decade", "1e-5:1e-3", "--points", "7"],
        &["pde", "--frozen-mu", "1", "--domain=-60:60", "--n", "481", "--t-end", "20", "--snapshot-every", "10"],
    ] {
        let (a, b) = run_twice(args);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn sweep_outputs_do_not_depend_on_jobs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["delay-sweep", "--fold", "--eps-decade", "1e-5:1e-3", "--points", "7"];
    assert!(quench(a.path(), &args).status.success());
    let mut parallel = args.to_vec();
    parallel.extend(["--jobs", "3"]);
    assert!(quench(b.path(), &parallel).status.success());
    assert_eq!(data_files(a.path()), data_files(b.path()));
}

#[test]
fn manifest_lists_nonempty_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert!(quench(dir.path(), &["front", "--c", "0", "--eps", "0.00981"]).status.success());
    let text = fs::read_to_string(dir.path().join("front_manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(m["command"], "front");
    assert_eq!(m["config_digest"].as_str().unwrap().len(), 64);
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for p in outputs {
        assert!(fs::metadata(p.as_str().unwrap()).unwrap().len() > 0);
    }
    let profile = fs::read_to_string(dir.path().join("front_profile.csv")).unwrap();
    let mut lines = profile.lines();
    assert!(lines.next().unwrap().starts_with("# command=front c=0 "));
    assert_eq!(lines.next().unwrap(), "xi,u,u_xi,mu,u_hm,deviation");
    assert!(!profile.lines().skip(2).any(|l| l.starts_with('#')));
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# painleve settings\nn = 4001\nwindow = 10:7\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert!(quench(dir.path(), &["painleve", "--config", cfg, "--n", "5001"]).status.success());
    let header = fs::read_to_string(dir.path().join("painleve_solution.csv")).unwrap();
    let header = header.lines().next().unwrap();
    assert!(header.contains(" n=5001 "), "{header}");
    assert!(header.contains(" window=10:7"), "{header}");
}

#[test]
fn painleve_reports_certified_value_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let out = quench(dir.path(), &["painleve", "--window", "12", "8"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("w(0) = 0.367"), "{stdout}");
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("painleve_certificates.json")).unwrap()).unwrap();
    assert!(cert["left_boundary_residual"].as_f64().unwrap() < 1e-8);
    assert!(cert["right_boundary_residual"].as_f64().unwrap() < 1e-8);
    assert!(cert["failures"].as_array().unwrap().is_empty());
}

#[test]
fn single_point_sweep_refuses_fit_but_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = quench(dir.path(), &["delay-sweep", "--fold", "--eps", "0.001"]);
    assert!(out.status.success());
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("delay_fit.json")).unwrap()).unwrap();
    assert!(fit["exponent"].is_null());
    assert!(fit["refused"].is_string());
    let rows = fs::read_to_string(dir.path().join("delay_sweep.csv")).unwrap();
    assert_eq!(rows.lines().count(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| quench(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["painleve", "--n", "4001"]), 0);
    assert_eq!(code(&["front", "--c", "2.5"]), 1);
    assert_eq!(code(&["front", "--bogus"]), 1);
    assert_eq!(code(&["pde", "--frame", "rotating"]), 1);
    assert_eq!(code(&["pde", "--dt", "1"]), 1);
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "no equals sign here\n").unwrap();
    assert_eq!(code(&["pde", "--config", bad.to_str().unwrap()]), 1);
    fs::write(&bad, "eps = fast\n").unwrap();
    assert_eq!(code(&["pde", "--config", bad.to_str().unwrap()]), 1);
    // A steep, fast front on a coarse mesh: Newton gives up.
    assert_eq!(code(&["front", "--c", "1.9", "--eps", "0.0001", "--n", "2001"]), 2);
    assert!(dir.path().join("front_failure.json").exists());
}

#[test]
fn help_names_the_reproduced_claim() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, claim) in [
        ("front", "absolute-instability threshold"),
        ("delay-sweep", "measured slope is 0.650"),
        ("painleve", "w(0) >= Ai(0) = 0.355028"),
        ("pde", "moves slightly faster than the characteristic prediction"),
    ] {
        let out = quench(dir.path(), &[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        let flat = text.split_whitespace().collect::<Vec<_>>().join(" ");
        assert!(flat.contains(claim), "{cmd}: {text}");
    }
}
