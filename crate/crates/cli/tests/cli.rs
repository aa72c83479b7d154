use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn lacsum(dir: &Path, args: &[&str]) -> Run {
    lacsum_env(dir, args, &[])
}

fn lacsum_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lacsum"));
    cmd.current_dir(dir).args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(run: &Run) -> Value {
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let v: Value = serde_json::from_str(run.stdout.trim()).expect("stdout is JSON");
    assert_eq!(v["schema"], 1);
    v
}

fn keys(v: &Value) -> Vec<&str> {
    let mut k: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    k.sort();
    k
}

fn run_dirs(dir: &Path) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir.join("runs")).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    out
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn norms_quadrature_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json(&lacsum(tmp.path(), &["norms", "--freqs", "1,2", "--p", "1", "--method", "quad"]));
    assert_eq!(keys(&v), ["method", "n", "normalized", "p", "samples", "schema", "seed", "std_error", "value"]);
    assert!((f(&v["value"]) - 4.0 / std::f64::consts::PI).abs() < 1e-6);
    assert_eq!(v["method"], "quad");
    assert!(v["std_error"].is_null());
}

#[test]
fn norms_monte_carlo_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json(&lacsum(tmp.path(), &["norms", "--lacunary", "8,6", "--method", "mc", "--samples", "2e4", "--seed", "5"]));
    assert_eq!(v["method"], "mc");
    assert_eq!(v["seed"], 5);
    assert_eq!(v["samples"], 20000);
    assert_eq!(v["n"], 6);
    assert!(f(&v["std_error"]) > 0.0);
    let p4 = json(&lacsum(tmp.path(), &["norms", "--freqs", "1,2,5", "--p", "4"]));
    assert!((f(&p4["value"]).powi(4) - 15.0).abs() < 1e-9);
}

#[test]
fn floats_have_17_significant_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let run = lacsum(tmp.path(), &["norms", "--freqs", "1,2", "--method", "quad", "--no-record"]);
    assert!(run.stdout.contains("\"value\":1.2732395447351"), "{}", run.stdout);
    let v = json(&run);
    let text = run.stdout.clone();
    let start = text.find("\"value\":").unwrap() + 8;
    let digits: String = text[start..].chars().take_while(|c| *c != 'e').filter(char::is_ascii_digit).collect();
    assert_eq!(digits.len(), 17);
    assert!(f(&v["value"]) > 0.0);
}

#[test]
fn energy_and_eval_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json(&lacsum(tmp.path(), &["energy", "--freqs", "1,2,5"]));
    assert_eq!(v["energy"], 15);
    assert_eq!(v["is_sidon"], true);
    assert_eq!(keys(&v), ["energy", "is_sidon", "l1_lower_bound", "n", "normalized_lower_bound", "schema"]);
    let v = json(&lacsum(tmp.path(), &["eval", "--freqs", "1,2,5", "--theta", "0"]));
    assert_eq!(f(&v["re"]), 3.0);
    assert_eq!(f(&v["im"]), 0.0);
}

#[test]
fn sidon_emits_file_format() {
    let tmp = tempfile::tempdir().unwrap();
    let run = lacsum(tmp.path(), &["sidon", "--n", "10"]);
    assert_eq!(run.code, 0);
    let path = tmp.path().join("sidon.txt");
    fs::write(&path, &run.stdout).unwrap();
    let v = json(&lacsum(tmp.path(), &["energy", "--freqs-file", path.to_str().unwrap()]));
    assert_eq!(v["energy"], 190);
    assert_eq!(v["is_sidon"], true);
    let v = json(&lacsum(tmp.path(), &["sidon", "--n", "5", "--json"]));
    assert_eq!(v["freqs"], serde_json::json!([1, 2, 4, 8, 13]));
}

#[test]
fn clt_report_and_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "clt", "--lacunary", "8,8", "--samples", "20000", "--seed", "7", "--phi-grid", "default", "--chain-audit",
        "--report", "out.json", "--csv", "phi.csv",
    ];
    let v = json(&lacsum(tmp.path(), &args));
    for key in ["n", "samples", "seed", "radial_mean", "radial_std_error", "ks_mu", "ks_nu", "cov_hat", "phi_grid"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["phi_grid"].as_array().unwrap().len(), 49);
    assert!(v["chain_audit"]["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true));
    let file: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(file, v);
    let phi = fs::read_to_string(tmp.path().join("phi.csv")).unwrap();
    assert!(phi.starts_with("s,t,re,im,std_error,gaussian,deviation\n"));
    assert_eq!(phi.lines().count(), 50);
    let ecdf = fs::read_to_string(tmp.path().join("phi.ecdf.csv")).unwrap();
    assert!(ecdf.starts_with("p,mu,cdf_mu,nu,cdf_nu\n"));
    assert_eq!(ecdf.lines().count(), 1001);

    let v = json(&lacsum(tmp.path(), &["clt", "--freqs", "1,2", "--samples", "1000", "--seed", "1", "--phi-grid", "0,1"]));
    assert_eq!(v["phi_grid"].as_array().unwrap().len(), 4);
    assert!(v["chain_audit"].is_null());
}

#[test]
fn search_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json(&lacsum(tmp.path(), &["search", "--n", "2", "--max-freq", "5"]));
    assert_eq!(v["best_set"], serde_json::json!([1, 2]));
    assert!((f(&v["best_value"]) - 0.9003163161571061).abs() < 1e-6);
    assert!(f(&v["best_value"]) >= f(&v["certificate"]["normalized_lower_bound"]));
    let v = json(&lacsum(tmp.path(), &["search", "--n", "3", "--max-freq", "20", "--mode", "anneal", "--budget", "500", "--seed", "2"]));
    assert_eq!(v["method"], "anneal");
    assert_eq!(v["seed"], 2);
}

#[test]
fn study_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let v = json(&lacsum(tmp.path(), &["study", "--q", "8", "--n-list", "2,4", "--samples", "1e4", "--seed", "7", "--csv", "s.csv"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(keys(&rows[0]), ["gap_to_limit", "n", "normalized_l1", "std_error"]);
    let csv = fs::read_to_string(tmp.path().join("s.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,normalized_l1,std_error,gap_to_limit");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(lacsum(d, &["norms"]).code, 1);
    assert_eq!(lacsum(d, &["frobnicate"]).code, 1);
    assert_eq!(lacsum(d, &["norms", "--freqs", "1,x"]).code, 1);
    assert_eq!(lacsum(d, &["norms", "--freqs", "2,2"]).code, 1);
    assert_eq!(lacsum(d, &["norms", "--freqs", "1,2", "--p", "3"]).code, 1);
    assert_eq!(lacsum(d, &["norms", "--freqs", "1", "--samples", "1.5"]).code, 1);
    assert_eq!(lacsum(d, &["--help"]).code, 0);
    assert_eq!(lacsum(d, &["norms", "--lacunary", "8,22"]).code, 2);
    assert_eq!(lacsum(d, &["norms", "--lacunary", "8,12", "--method", "quad"]).code, 2);
    assert_eq!(lacsum(d, &["search", "--n", "8", "--max-freq", "1000"]).code, 2);
    assert_eq!(lacsum_env(d, &["energy", "--freqs", "1"], &[("LACSUM_THREADS", "zero")]).code, 1);
}

#[test]
fn records_are_written_unless_disabled() {
    let tmp = tempfile::tempdir().unwrap();
    lacsum(tmp.path(), &["energy", "--freqs", "1,2,5", "--no-record"]);
    assert!(!tmp.path().join("runs").exists());
    json(&lacsum(tmp.path(), &["energy", "--freqs", "1,2,5"]));
    let dirs = run_dirs(tmp.path());
    assert_eq!(dirs.len(), 1);
    let rec: Value = serde_json::from_str(&fs::read_to_string(dirs[0].join("record.json")).unwrap()).unwrap();
    for key in ["command_line", "config", "seeds", "input_hash", "started", "finished", "payload"] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
    assert_eq!(rec["config"]["command"], "energy");
    assert_eq!(rec["payload"]["energy"], 15);
    let name = dirs[0].file_name().unwrap().to_str().unwrap();
    assert!(name.ends_with(&rec["input_hash"].as_str().unwrap()[..12]));
}

#[test]
fn replay_is_bit_exact_and_detects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    json(&lacsum(d, &["norms", "--freqs", "1,2,5", "--method", "quad"]));
    json(&lacsum(d, &["norms", "--lacunary", "8,10", "--method", "mc", "--samples", "30000", "--seed", "11"]));
    let dirs = run_dirs(d);
    assert_eq!(dirs.len(), 2);
    for dir in &dirs {
        let r = lacsum(d, &["replay", dir.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(json(&r)["matches"], true);
        // a different worker count must not matter
        let r = lacsum_env(d, &["replay", dir.to_str().unwrap()], &[("LACSUM_THREADS", "3")]);
        assert_eq!(r.code, 0);
    }
    let file = dirs[1].join("record.json");
    let mut rec: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    let v = f(&rec["payload"]["value"]);
    rec["payload"]["value"] = Value::from(v + 1e-15 * v);
    fs::write(&file, serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(lacsum(d, &["replay", dirs[1].to_str().unwrap()]).code, 3);
    assert_eq!(lacsum(d, &["replay", d.join("nope").to_str().unwrap()]).code, 1);
}

#[test]
fn fresh_seeds_are_recorded_and_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let a = json(&lacsum(d, &["norms", "--lacunary", "8,8", "--method", "mc", "--samples", "50000"]));
    let b = json(&lacsum(d, &["norms", "--lacunary", "8,8", "--method", "mc", "--samples", "50000"]));
    assert_ne!(a["seed"], b["seed"]);
    let sigma = f(&a["std_error"]).hypot(f(&b["std_error"]));
    assert!((f(&a["value"]) - f(&b["value"])).abs() <= 6.0 * sigma);
    for dir in run_dirs(d) {
        let rec: Value = serde_json::from_str(&fs::read_to_string(dir.join("record.json")).unwrap()).unwrap();
        assert_eq!(rec["seeds"][0], rec["config"]["seed"]);
        assert_eq!(rec["payload"]["seed"], rec["config"]["seed"]);
        assert_eq!(lacsum(d, &["replay", dir.to_str().unwrap()]).code, 0);
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["clt", "--lacunary", "8,12", "--samples", "150000", "--seed", "3", "--chunk-size", "4096", "--no-record"];
    let one = lacsum_env(tmp.path(), &args, &[("LACSUM_THREADS", "1")]);
    for threads in ["4", "8"] {
        let many = lacsum_env(tmp.path(), &args, &[("LACSUM_THREADS", threads)]);
        assert_eq!(one.code, 0);
        assert_eq!(one.stdout, many.stdout);
    }
}
