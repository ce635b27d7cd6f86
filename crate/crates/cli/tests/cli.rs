use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const COLLAPSE: &str = r#"
exponents = [0.5]

[[system]]
alphabet = 4

[[system]]
alphabet = ["a", "b"]

[[code]]
map = ["a", "a", "b", "b"]

[schedule]
n_max = 6

[measure]
kind = "uniform"

[optimizer]
family = "bernoulli"

[duality]
symbol = "0"
coefficients = [-1.0, 0.0, 1.0]

[report]
suites = ["weights"]
"#;

const IDENTITY: &str = r#"
exponents = [0.3]
[[system]]
alphabet = 2
[[system]]
alphabet = 2
[[code]]
map = ["0", "1"]
[schedule]
n_max = 8
"#;

struct Case {
    dir: TempDir,
}

impl Case {
    fn new(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("instance.toml"), config).unwrap();
        Case { dir }
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str], out: &str) -> Output {
        let config = self.dir.path().join("instance.toml");
        Command::new(env!("CARGO_BIN_EXE_wtp"))
            .args(args)
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(self.out(out))
            .output()
            .unwrap()
    }
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn pressure_of_collapse() {
    let case = Case::new(COLLAPSE);
    let o = case.run(&["pressure"], "run");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&case.out("run").join("pressure.json"));
    let est = report["pressure"][0]["data"]["estimate"].as_f64().unwrap();
    assert!((est - 1.5 * LN_2).abs() <= 1e-9);
    assert_eq!(report["pressure"][0]["module"], "weighted_pressure");
    assert_eq!(report["pressure"][0]["digest"], report["digest"]);

    let csv = std::fs::read_to_string(case.out("run").join("pressure.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,size,refinement,log_z,value,running_inf"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn pressure_of_identity_chain() {
    let case = Case::new(IDENTITY);
    let o = case.run(&["pressure", "--n-max", "5"], "run");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&case.out("run").join("pressure.json"));
    let rows = report["pressure"][0]["data"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!((r["value"].as_f64().unwrap() - LN_2).abs() <= 1e-12);
    }
}

#[test]
fn exponent_out_of_range_is_a_config_error() {
    let case = Case::new(&COLLAPSE.replace("[0.5]", "[1.5]"));
    let o = case.run(&["pressure"], "run");
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("exponent outside [0,1]"), "{err}");
    assert!(err.contains("line 2"), "{err}");
    assert!(!case.out("run").exists());
}

#[test]
fn markov_on_plane_is_a_mismatch() {
    let config = r#"
dim = 2
exponents = [0.5]
[[system]]
alphabet = 2
[[system]]
alphabet = 1
[[code]]
map = ["0", "0"]
[schedule]
n_max = 2
[optimizer]
family = "markov"
"#;
    let case = Case::new(config);
    let o = case.run(&["variational"], "run");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("family/system mismatch"), "{}", stderr(&o));
}

#[test]
fn variational_reaches_pressure() {
    let case = Case::new(COLLAPSE);
    let o = case.run(&["variational", "--n-max", "4"], "run");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&case.out("run").join("variational.json"));
    let v = &report["variational"]["data"];
    let best = v["optimum"]["value"]["lower"].as_f64().unwrap();
    assert!((best - 1.5 * LN_2).abs() <= 1e-3);
    assert!(v["gap"].as_f64().unwrap().abs() <= 1e-3);
    assert!(case.out("run").join("trace.csv").exists());
}

#[test]
fn seed_changes_trace_not_digest() {
    let case = Case::new(COLLAPSE);
    let a = case.run(&["variational", "--n-max", "4", "--seed", "1"], "a");
    let b = case.run(&["variational", "--n-max", "4", "--seed", "2"], "b");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let (ra, rb) = (json(&case.out("a").join("variational.json")), json(&case.out("b").join("variational.json")));
    assert_eq!(ra["digest"], rb["digest"]);
    assert_ne!(ra["seed"], rb["seed"]);
    let value = |r: &Value| r["variational"]["data"]["optimum"]["value"]["lower"].as_f64().unwrap();
    assert!((value(&ra) - value(&rb)).abs() <= 1e-6);
}

#[test]
fn reruns_are_byte_identical() {
    let case = Case::new(COLLAPSE);
    for out in ["a", "b"] {
        let o = case.run(&["report", "--n-max", "4", "--seed", "5"], out);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for file in ["report.json", "pressure.csv", "trace.csv", "nu.csv"] {
        let a = std::fs::read(case.out("a").join(file)).unwrap();
        let b = std::fs::read(case.out("b").join(file)).unwrap();
        assert!(a == b, "{file} differs between reruns");
    }
    assert!(case.out("a").join("timings.json").exists());
}

#[test]
fn report_contains_every_stage() {
    let case = Case::new(COLLAPSE);
    let o = case.run(&["report", "--n-max", "3"], "run");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&case.out("run").join("report.json"));
    for key in ["pressure", "objective", "variational", "nu", "duality", "checks"] {
        assert!(!r[key].is_null(), "missing {key}");
    }
    let names: Vec<&str> =
        r["checks"].as_array().unwrap().iter().map(|c| c["data"]["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["instance-inequality", "optimizer-soundness", "instance-identity", "instance-duality", "weights"]
    );
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.trim_end().ends_with("PASS"));
}

#[test]
fn nu_construct_checks_identities() {
    let case = Case::new(COLLAPSE);
    let o = case.run(&["nu-construct", "--n-max", "3", "--refine-max", "1"], "run");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&case.out("run").join("nu-construct.json"));
    assert_eq!(r["nu"].as_array().unwrap().len(), 6);
    let csv = std::fs::read_to_string(case.out("run").join("nu.csv")).unwrap();
    let total: f64 = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() <= 1e-12);
}

#[test]
fn verify_suites() {
    let case = Case::new(IDENTITY);
    let o = case.run(&["verify", "identity"], "identity");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&case.out("identity").join("verify.json"));
    let names: Vec<&str> =
        r["checks"].as_array().unwrap().iter().map(|c| c["data"]["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["identity", "instance-identity"]);

    let o = case.run(&["verify", "folner"], "folner");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = case.run(&["verify", "nonsense"], "bad");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown suite"));
}

#[test]
fn verify_without_config() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        Command::new(env!("CARGO_BIN_EXE_wtp")).args(["verify", "walters", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("[PASS]  8 walters"), "{stdout}");
}

#[test]
fn budget_overrun_is_a_run_error() {
    let case = Case::new(COLLAPSE);
    let o = case.run(&["pressure", "--budget", "10"], "run");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget"), "{}", stderr(&o));
}
