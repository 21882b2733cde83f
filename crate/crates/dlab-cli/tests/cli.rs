use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlab"))
        .args(args)
        .current_dir(dir)
        .env("DLAB_WORKERS", "1")
        .output()
        .expect("spawn dlab")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

/// Physical-side GF01 samples of `f` on the centred grid.
fn write_gf(path: &Path, n: usize, length: f64, f: impl Fn(f64) -> f64) {
    let x0 = -0.5 * length;
    let mut b = b"GF01".to_vec();
    b.extend((n as u64).to_le_bytes());
    b.extend(length.to_le_bytes());
    b.extend(x0.to_le_bytes());
    b.push(0);
    for j in 0..n {
        b.extend(f(x0 + j as f64 * length / n as f64).to_le_bytes());
        b.extend(0f64.to_le_bytes());
    }
    fs::write(path, b).unwrap();
}

#[test]
fn verify_exponents_reports_the_conjugate_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dlab(dir.path(), &["verify", "exponents", "--alpha", "1.8", "--no-timestamps"]);
    assert_eq!(out.status.code(), Some(0));
    let m = json(&out);
    let measured = &m["checks"][0]["measured"];
    assert!((measured["p_S@1.8"].as_f64().unwrap() - 4.5).abs() < 1e-12);
    assert!((measured["q_S@1.8"].as_f64().unwrap() - 9.0).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exponents: PASS"));
}

#[test]
fn verify_galilean_with_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dlab(dir.path(), &["verify", "galilean", "--xi", "2", "--t", "0.1", "--csv", "g.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("g.csv")).unwrap();
    assert!(csv.starts_with("check,passed,key,value\n"));
    assert!(csv.lines().skip(1).all(|l| l.starts_with("galilean,true,")));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dlab(dir.path(), &["verify", "exponents", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(dlab(dir.path(), &["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(dlab(dir.path(), &["norm", "kind=ell", "missing.gf"]).status.code(), Some(2));
    assert_eq!(dlab(dir.path(), &["solve", "nls", "--preset", "soliton"]).status.code(), Some(2));
    assert_eq!(dlab(dir.path(), &["solve", "gkdv", "--n", "100"]).status.code(), Some(2));
}

#[test]
fn soliton_run_conserves_mass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dlab(dir.path(), &["solve", "gkdv", "--preset", "soliton", "--alpha", "1", "--out", "q.stf"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&out);
    assert!(m["results"]["max_l2_drift"].as_f64().unwrap() < 1e-5);
    assert!(m["checks"][0]["passed"].as_bool().unwrap());
    let stf = fs::read(dir.path().join("q.stf")).unwrap();
    assert_eq!(&stf[..4], b"STF1");
    let info = json(&dlab(dir.path(), &["gf", "info", "q.stf"]));
    assert_eq!(info["frames"], 51);
    assert_eq!(info["t_last"], 0.5);
}

#[test]
fn runs_without_timestamps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        dlab(dir.path(), &["solve", "gkdv", "--n", "128", "--t-end", "0.05", "--frames", "5", "--out", out, "--no-timestamps"])
    };
    let (a, b) = (run("a.stf"), run("b.stf"));
    assert_eq!(a.status.code(), Some(0));
    // the manifests differ only in the output path
    let strip = |o: &Output| String::from_utf8_lossy(&o.stdout).replace("a.stf", "X").replace("b.stf", "X");
    assert_eq!(strip(&a), strip(&b));
    assert!(!strip(&a).contains("wall_clock"));
    assert_eq!(fs::read(dir.path().join("a.stf")).unwrap(), fs::read(dir.path().join("b.stf")).unwrap());
}

#[test]
fn gf_convert_round_trips_through_the_fourier_side() {
    let dir = tempfile::tempdir().unwrap();
    write_gf(&dir.path().join("u.gf"), 64, 20.0, |x| (-x * x).exp());
    let ok = |args: &[&str]| assert_eq!(dlab(dir.path(), args).status.code(), Some(0), "{args:?}");
    ok(&["gf", "convert", "u.gf", "hat.gf", "--side", "fourier"]);
    ok(&["gf", "convert", "hat.gf", "back.gf", "--side", "physical"]);
    ok(&["gf", "convert", "hat.gf", "hat.csv", "--side", "fourier"]);
    let info = json(&dlab(dir.path(), &["gf", "info", "hat.gf"]));
    assert_eq!(info["side"], "fourier");
    assert_eq!(fs::metadata(dir.path().join("hat.gf")).unwrap().len(), 29 + 16 * 64);

    let a = json(&dlab(dir.path(), &["gf", "info", "u.gf"]));
    let b = json(&dlab(dir.path(), &["gf", "info", "back.gf"]));
    assert!((a["l2_norm"].as_f64().unwrap() - b["l2_norm"].as_f64().unwrap()).abs() < 1e-14);

    let csv = fs::read_to_string(dir.path().join("hat.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("xi,re,im"));
    let xis: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(xis.len(), 64);
    assert!(xis.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn norm_reads_inline_and_file_specs() {
    let dir = tempfile::tempdir().unwrap();
    write_gf(&dir.path().join("u.gf"), 128, 40.0, |x| (-x * x).exp());
    fs::write(dir.path().join("l2.spec"), "kind=lhat\nr=2\n").unwrap();
    let value = |args: &[&str]| {
        let out = dlab(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        json(&out)["results"]["value"].as_f64().unwrap()
    };
    // ‖e^{−x²}‖₂ = (π/2)^{1/4}
    let l2 = (std::f64::consts::PI / 2.0).powf(0.25);
    assert!((value(&["norm", "l2.spec", "u.gf"]) - l2).abs() < 1e-12);
    assert!((value(&["norm", "kind=lhat,r=2", "u.gf"]) - l2).abs() < 1e-12);

    let ell = value(&["norm", "kind=ell", "u.gf", "--alpha", "1.8", "--sigma", "3"]);
    let windowed = value(&["norm", "kind=ell", "u.gf", "--alpha", "1.8", "--sigma", "3", "--window", "0:2"]);
    assert!(ell.is_finite() && windowed <= ell + 1e-12);
}

#[test]
fn profiles_on_a_translated_sequence() {
    let dir = tempfile::tempdir().unwrap();
    for k in 0..3 {
        write_gf(&dir.path().join(format!("u{k}.gf")), 256, 40.0, |x| (-(x - k as f64).powi(2)).exp() * (3.0 * x).cos());
    }
    fs::write(dir.path().join("seq.json"), r#"{"files": ["u0.gf", "u1.gf", "u2.gf"]}"#).unwrap();

    let out = dlab(dir.path(), &["profiles", "extract", "seq.json", "--out", "ex", "--csv", "g.csv", "--no-timestamps"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("ex/psi.gf").exists());
    assert_eq!(json(&out)["results"]["gammas"].as_array().unwrap().len(), 3);
    assert!(fs::read_to_string(dir.path().join("g.csv")).unwrap().starts_with("index,active,h,xi,s,y\n"));

    let out = dlab(dir.path(), &["profiles", "decompose", "seq.json", "--out", "dec", "--j-max", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&out);
    assert!(m["results"]["reconstruction_error"].as_f64().unwrap() < 1e-10);
    assert!(m["results"]["ledger"]["holds"].as_bool().unwrap());
    assert!(dir.path().join("dec/profile_0.gf").exists());
}

#[test]
fn embed_writes_one_row_per_carrier() {
    let dir = tempfile::tempdir().unwrap();
    let out = dlab(dir.path(), &["embed", "--n", "256", "--xi", "4,8", "--t-end", "0.5", "--csv", "e.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("e.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "xi,seam_time,err_lhat_alpha,norm_S,norm_L,residual_Y");
    assert_eq!(lines.len(), 3);
    assert_eq!(json(&out)["results"]["rows"].as_array().unwrap().len(), 2);
}
