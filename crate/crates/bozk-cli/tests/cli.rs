use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_bozk");

fn dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN).args(args).arg("--out-dir").arg(out).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn passing_run_exits_zero_and_writes_artifacts() {
    let d = dir("pass");
    let o = run(&["tech-lemma", "samples=1000"], &d);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS violations"));
    let m = json(&d.join("manifest.json"));
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["seed"], 0);
    assert_eq!(m["threads"], 1);
    assert_eq!(m["config"]["samples"], "1000");
    assert!(m["outputs"]["report.csv"].as_str().unwrap().len() == 16);
    let s = json(&d.join("summary.json"));
    assert_eq!(s["checks"]["violations"]["passed"], true);
}

#[test]
fn failed_check_exits_two() {
    let d = dir("fail");
    let o = run(&["scaling", "time.t_end=0.05", "tol.discrepancy=1e-300"], &d);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL discrepancy"));
    assert_eq!(json(&d.join("manifest.json"))["exit_code"], 2);
}

#[test]
fn invalid_value_exits_one_and_names_the_constraint() {
    let d = dir("invalid");
    let o = run(&["simulate", "alpha=2.5"], &d);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.contains("alpha") && e.contains("[1,2]"), "{e}");
    let m = json(&d.join("manifest.json"));
    assert_eq!(m["exit_code"], 1);
    assert!(m["error"].as_str().unwrap().contains("alpha"));
}

#[test]
fn derived_and_unknown_keys_are_rejected() {
    let d = dir("keys");
    let e = stderr(&run(&["simulate", "B=1"], &d));
    assert!(e.contains("derived, not settable"), "{e}");
    let e = stderr(&run(&["tech-lemma", "sample=10"], &d));
    assert!(e.contains("unknown key 'sample'") && e.contains("samples"), "{e}");
}

#[test]
fn config_file_errors_carry_line_numbers() {
    let d = dir("ini");
    let cfg = d.join("bad.ini");
    std::fs::write(&cfg, "# comment\nalpha = 1.5\nthis line is wrong\n").unwrap();
    let o = run(&["tech-lemma", cfg.to_str().unwrap()], &d);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.ini:3"), "{}", stderr(&o));

    std::fs::write(&cfg, "[grid]\nnx = 64\n[nosuch]\n").unwrap();
    let o = run(&["simulate", cfg.to_str().unwrap()], &d);
    assert!(stderr(&o).contains("bad.ini:3") && stderr(&o).contains("nosuch"), "{}", stderr(&o));
}

#[test]
fn overrides_take_precedence_over_the_file() {
    let d = dir("precedence");
    let cfg = d.join("run.ini");
    std::fs::write(&cfg, "samples = 500\ndelta = 0.2\n").unwrap();
    let o = run(&["tech-lemma", cfg.to_str().unwrap(), "samples=700", "--seed", "3"], &d);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&d.join("manifest.json"));
    assert_eq!(m["config"]["samples"], "700");
    assert_eq!(m["config"]["delta"], "0.2");
    assert_eq!(m["seed"], 3);
    assert!(m["inputs"].as_object().unwrap().len() == 1);
}

#[test]
fn simulation_restarts_from_its_final_state() {
    let a = dir("restart-a");
    let args = ["grid.nx=32", "grid.ny=32", "time.dt=1e-2", "time.t_end=0.1", "time.monitor_stride=5"];
    let o = run(&[&["simulate"][..], &args].concat(), &a);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fin = a.join("final.bin");
    let b = dir("restart-b");
    let file_arg = format!("data.file={}", fin.display());
    let o = run(&["simulate", "data.kind=file", &file_arg, "time.dt=1e-2", "time.t_end=0.1"], &b);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&b.join("manifest.json"));
    assert!(m["inputs"].as_object().unwrap().contains_key(&fin.display().to_string()));
    let s = json(&b.join("summary.json"));
    assert!(s["results"]["mass_drift"].as_f64().unwrap() < 1e-10);

    let o = run(&["simulate", "data.kind=file", &file_arg, "alpha=1"], &b);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha"));
}

#[test]
fn print_defaults_lists_every_key() {
    let o = Command::new(BIN).args(["energy", "--print-defaults"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for key in ["alpha = 1.5", "grid.n = 64", "variant = same", "smallness = 0.01"] {
        assert!(text.contains(key), "{key} missing from\n{text}");
    }
}
