use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn exlimit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exlimit"))
        .args(args)
        .current_dir(dir)
        .env_remove("EXLIMIT_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const EXAMPLE2_LIMIT: &str = r#"
name = "ex2"
mode = "limit"
builder = "example2"
p = 0.5
xi = { family = "normal", mean = 0.0, variance = 1.0 }
grid = { lo = -1.0, hi = 3.0, steps = 81 }
"#;

const SMALL_VERIFY: &str = r#"
name = "small"
mode = "verify"
n = 400
replications = 4000
output = "small.csv"

[[components]]
weight = 1.0
family = "normal"
mean = 0.0
variance = 1.0
"#;

#[test]
fn limit_mode_writes_theoretical_curve() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "ex2.toml", EXAMPLE2_LIMIT);
    let out = exlimit(dir.path(), &[&cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("ex2.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,theoretical"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, t) = l.split_once(',').unwrap();
            (x.parse().unwrap(), t.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 81);
    let (_, at_one) = rows.iter().find(|(x, _)| *x == 1.0).unwrap();
    assert!((at_one - 0.841_344_746_068_543).abs() < 1e-6);
    assert!(rows.iter().filter(|(x, _)| *x < 0.0).all(|(_, t)| *t == 0.0));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ex2.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["model_summary"]["p_zero_degenerate"], 0.5);
    assert_eq!(summary["mode"], "limit");
    assert!(summary["runtime_seconds"].is_number());
}

#[test]
fn verify_mode_schema_and_assert() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL_VERIFY);
    let out = exlimit(dir.path(), &[&cfg, "--assert", "0.2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("small.csv")).unwrap();
    assert!(csv.starts_with("x,empirical,theoretical,abs_diff\n"));
    assert_eq!(csv.lines().count(), 102);

    // a budget no finite sample can meet
    let out = exlimit(dir.path(), &[&cfg, "--assert", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
}

#[test]
fn mode_override_and_other_schemas() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL_VERIFY);
    let out = exlimit(dir.path(), &["simulate", &cfg, "--out", "sim.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sim.csv")).unwrap();
    assert!(csv.starts_with("x,empirical\n"));
    let q = fs::read_to_string(dir.path().join("sim.quantiles.csv")).unwrap();
    assert!(q.starts_with("probability,quantile\n"));

    let sweep = format!("sweep_ns = [25, 100, 400]\n{SMALL_VERIFY}");
    let cfg = write(dir.path(), "sweep.toml", &sweep);
    let out = exlimit(dir.path(), &["sweep", &cfg, "--out", "sweep.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,sup_distance");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("400,"));
}

#[test]
fn thread_count_and_seed_controls() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL_VERIFY);
    let read = |name: &str| fs::read(dir.path().join(name)).unwrap();

    assert!(exlimit(dir.path(), &[&cfg, "--threads", "1", "--out", "t1.csv"]).status.success());
    assert!(exlimit(dir.path(), &[&cfg, "--threads", "3", "--out", "t3.csv"]).status.success());
    let env_run = Command::new(env!("CARGO_BIN_EXE_exlimit"))
        .args([cfg.as_str(), "--out", "env.csv"])
        .current_dir(dir.path())
        .env("EXLIMIT_THREADS", "2")
        .output()
        .unwrap();
    assert!(env_run.status.success());
    assert_eq!(read("t1.csv"), read("t3.csv"));
    assert_eq!(read("t1.csv"), read("env.csv"));

    assert!(exlimit(dir.path(), &[&cfg, "--seed", "7", "--out", "s7.csv"]).status.success());
    assert_ne!(read("t1.csv"), read("s7.csv"));
    let summary: serde_json::Value =
        serde_json::from_str(&String::from_utf8(read("s7.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 7);
}

#[test]
fn validation_failures_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad_weights = write(
        dir.path(),
        "bad.toml",
        "name = \"bad\"\nmode = \"limit\"\n[[components]]\nweight = 0.9\nfamily = \"normal\"\nmean = 0.0\nvariance = 1.0\n",
    );
    let out = exlimit(dir.path(), &[&bad_weights]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weights sum to 0.9"));

    let unknown = write(dir.path(), "unk.toml", "name = \"u\"\nmode = \"limit\"\nbuilder = \"example1\"\nsed = 3\n");
    let out = exlimit(dir.path(), &[&unknown]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key `sed`"));

    let cfg = write(dir.path(), "ex2.toml", EXAMPLE2_LIMIT);
    assert_eq!(exlimit(dir.path(), &["explore", &cfg]).status.code(), Some(1));
    assert_eq!(exlimit(dir.path(), &[&cfg, "--assert", "0.1"]).status.code(), Some(1));
    assert_eq!(exlimit(dir.path(), &[&cfg, "--threads", "0"]).status.code(), Some(1));
    assert_eq!(exlimit(dir.path(), &["missing.toml"]).status.code(), Some(1));
    assert_eq!(exlimit(dir.path(), &[]).status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "ex2.toml", EXAMPLE2_LIMIT);
    let out = exlimit(dir.path(), &[&cfg, "--out", "no/such/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(2));
}
