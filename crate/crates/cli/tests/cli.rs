use std::path::Path;
use std::process::{Command, Output};

fn sievelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sievelab")).args(args).env_remove("SIEVELAB_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn rows(o: &Output) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(o.stdout.as_slice()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn norm_single_point() {
    let o = sievelab(&["norm", "Q=3", "k=1", "T=1", "N=1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&o);
    assert_eq!(r.len(), 1);
    assert_eq!(&r[0][0], "norm");
    assert!((r[0][6].parse::<f64>().unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn verify_default_passes_and_zero_tolerance_fails() {
    let o = sievelab(&["verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = rows(&o);
    assert_eq!(r.len(), 12);
    assert!(r.iter().all(|x| &x[8] == "true"));
    let o = sievelab(&["verify", "--tol", "0", "suite=theta,bdh"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_restricted_suites() {
    let o = sievelab(&["verify", "suite=dk", "suite=duality"]);
    assert_eq!(code(&o), 0);
    let suites: Vec<String> = rows(&o)
        .iter()
        .map(|r| serde_json::from_str::<serde_json::Value>(&r[5]).unwrap()["suite"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(suites, ["dk", "duality"]);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["norm", "Q=x"],
        vec!["norm", "bogus=1"],
        vec!["norm", "N=0"],
        vec!["verify", "suite=nope"],
        vec!["verify", "--tol", "-1"],
        vec!["norm", "--format", "xml"],
        vec!["sieve", "plan=/nonexistent/plan.txt"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&sievelab(&args)), 2, "{args:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_sievelab")).args(["bdh", "X=5", "Q=2", "inputs=1"]).env("SIEVELAB_THREADS", "lots").output().unwrap();
    assert_eq!(code(&o), 2);
}

fn strip_clock_columns(csv_text: &[u8]) -> Vec<Vec<String>> {
    let mut rd = csv::Reader::from_reader(csv_text);
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    let keep: Vec<usize> = (0..header.len()).filter(|&i| header[i] != "millis" && header[i] != "timestamp").collect();
    rd.records().map(|r| { let r = r.unwrap(); keep.iter().map(|&i| r[i].to_string()).collect() }).collect()
}

#[test]
fn output_is_deterministic_apart_from_clock_columns() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let o = sievelab(&[
            "scan", "--seed", "11", "--threads", threads, "--out", path.to_str().unwrap(), "Q=3,4,5", "k=1,2", "N=16,32,64,600",
        ]);
        assert_eq!(code(&o), 0);
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (sa, sb) = (strip_clock_columns(&ra), strip_clock_columns(&rb));
    assert_eq!(sa, sb);
    assert!(sa.iter().all(|r| r[9] == "11"));
    assert!(sa.iter().any(|r| r[0] == "scan_fit_N") && sa.iter().any(|r| r[0] == "scan_fit_Q"));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# norm grid\nQ=3\nk=1\nT=1\nN=1\nN=2\nseed=5\nformat=json\n").unwrap();
    let o = sievelab(&["norm", "--config", cfg.to_str().unwrap(), "--seed", "6"]);
    assert_eq!(code(&o), 0);
    let lines: Vec<serde_json::Value> =
        String::from_utf8(o.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l["seed"] == 6));
    assert_eq!(lines[0]["value"], 0.5);
    let o = sievelab(&["norm", "--config", cfg.to_str().unwrap(), "N=1", "--format", "csv"]);
    assert_eq!(rows(&o).len(), 1);
}

#[test]
fn sieve_plan_file_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("empty.plan");
    std::fs::write(&plan, "N=80\nQ=6\n").unwrap();
    let o = sievelab(&["sieve", &format!("plan={}", plan.display())]);
    assert_eq!(code(&o), 0);
    let r = rows(&o);
    assert_eq!(r.len(), 1);
    assert!(r[0][6].parse::<f64>().unwrap() <= 1.0);

    let plan = dir.path().join("one.plan");
    std::fs::write(&plan, "N=10\n3: 1\n").unwrap();
    let o = sievelab(&["sieve", &format!("plan={}", plan.display()), "Q=4"]);
    assert_eq!(code(&o), 0);
    let o = sievelab(&["sieve", &format!("plan={}", plan.display())]);
    assert_eq!(code(&o), 2, "no Q anywhere");

    let bin = dir.path().join("g.bin");
    let o = sievelab(&["norm", "Q=5", "N=20", &format!("dump={}", bin.display())]);
    assert_eq!(code(&o), 0);
    let bytes = std::fs::read(&bin).unwrap();
    assert_eq!(&bytes[..4], b"SLGM");
    assert!(Path::new(&bin).exists());
}

#[test]
fn bdh_records() {
    let o = sievelab(&["bdh", "X=20,40", "Q=4", "inputs=3"]);
    assert_eq!(code(&o), 0);
    let r = rows(&o);
    assert_eq!(r.len(), 6);
    assert!(r.iter().all(|x| &x[8] == "true"));
}
