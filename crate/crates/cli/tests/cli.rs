use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ssf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssf")).args(args).current_dir(dir).output().expect("run ssf")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn zero_trials_is_invalid_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = ssf(&["verify", "--kind", "linear", "--trials", "0"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));
}

#[test]
fn malformed_or_missing_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"seed": "seven"}"#).unwrap();
    assert_eq!(code(&ssf(&["verify", "--config", "bad.json"], dir.path())), 2);
    assert_eq!(code(&ssf(&["verify", "--config", "absent.json"], dir.path())), 2);
    assert_eq!(code(&ssf(&["verify", "--kind", "cubic"], dir.path())), 2);
    assert_eq!(code(&ssf(&["verify", "--grid", "16"], dir.path())), 2);
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"kind": "dilation", "trials": 0, "dims": [3]}"#).unwrap();
    let o = ssf(&["verify", "--config", "c.json", "--trials", "2", "--out", "run"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("run/summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| l.starts_with(&format!("{},3,dilation,", l.split(',').next().unwrap()))));
    let json = fs::read_to_string(dir.path().join("run/reports.json")).unwrap();
    assert!(json.trim_start().starts_with('['));
    assert_eq!(json.matches("\"check\":").count(), 2);
}

#[test]
fn failing_verification_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("strict.json"),
        r#"{"kind": "linear", "trials": 2, "dims": [2], "degrees": [4], "grid": 256,
            "tolerances": {"trace_formula": 1e-300}}"#,
    )
    .unwrap();
    let o = ssf(&["verify", "--config", "strict.json", "--out", "run"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(fs::read_to_string(dir.path().join("run/summary.csv")).unwrap().contains(",fail"));
    assert_eq!(code(&ssf(&["report", "--out", "run"], dir.path())), 1);
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["verify", "--kind", "mult", "--seed", "42", "--trials", "3", "--dims", "2,3", "--degrees", "2"];
    let a: Vec<&str> = base.iter().copied().chain(["--out", "a"]).collect();
    let b: Vec<&str> = base.iter().copied().chain(["--out", "b", "--sequential"]).collect();
    assert_eq!(code(&ssf(&a, dir.path())), 0);
    assert_eq!(code(&ssf(&b, dir.path())), 0);
    let a = fs::read(dir.path().join("a/summary.csv")).unwrap();
    let b = fs::read(dir.path().join("b/summary.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn eta_and_xi_sample_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = ssf(&["eta", "--kind", "linear", "--dims", "2", "--degrees", "3", "--grid", "4096", "--out", "s"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("s/eta.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,re_eta,im_eta");
    assert_eq!(lines.len(), 4097);
    assert!(lines[1].starts_with("0.0,"));

    let o = ssf(&["eta", "--kind", "cayley_sa", "--dims", "2", "--degrees", "3", "--grid", "512", "--out", "s"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("s/xi.csv")).unwrap();
    assert!(text.starts_with("lambda,re_xi,im_xi\n"));
    assert_eq!(text.lines().count(), 513);
}

#[test]
fn diagnose_writes_cdf_and_tables_and_report_summarizes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ssf(&["diagnose", "--dims", "4", "--degrees", "3", "--out", "d"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cdf = fs::read_to_string(dir.path().join("d/cdf.json")).unwrap();
    assert!(cdf.contains("\"dim\": 4") && cdf.contains("block_real") && cdf.contains("block_imag"));
    let diag = fs::read_to_string(dir.path().join("d/diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().count(), 5);
    let gap = fs::read_to_string(dir.path().join("d/gap_linear.csv")).unwrap();
    let last = gap.lines().last().unwrap();
    assert!(last.starts_with("4,linear,0.0,"), "{last}");

    assert_eq!(code(&ssf(&["verify", "--kind", "truncate", "--trials", "2", "--out", "d"], dir.path())), 0);
    let o = ssf(&["report", "--out", "d"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("truncate"));
    assert_eq!(code(&ssf(&["report", "--out", "nowhere"], dir.path())), 2);
}
