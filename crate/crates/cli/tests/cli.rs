use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sklyanin::report::{from_json, without_runtime, VerificationReport};

fn sklyanin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sklyanin")).args(args).output().expect("binary runs")
}

fn read_reports(path: &Path) -> Vec<VerificationReport> {
    from_json(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_sw_gaussian_a2() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("out.json");
    let out = sklyanin(&["verify", "sw", "--family", "A", "--rank", "2", "--weight", "gaussian", "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = read_reports(&report);
    assert_eq!(reports.len(), 1);
    assert!(reports[0].pass);
    assert!(reports[0].rel_error < 1e-9);
}

#[test]
fn malformed_weight_exits_2_without_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("out.json");
    for weight in [r#"{"kind": "gaussian", "width": 1}"#, "{not json", "lorentzian"] {
        let out = sklyanin(&["verify", "sw", "--family", "B", "--rank", "2", "--weight", weight, "--report", report.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "weight {weight}");
        assert!(!report.exists());
    }
}

#[test]
fn invalid_rank_exits_2() {
    let out = sklyanin(&["verify", "sw", "--family", "A", "--rank", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sklyanin(&["verify", "mb", "--family", "A", "--rank", "2", "--r", "3", "--a", "0.1,0.2", "--z", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(sklyanin(&["verify", "sw", "--family", "A", "--rank", "2", "--bogus"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_1_and_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("out.json");
    // A 4-point rule on the quartic weight cannot reach 1e-15.
    let out = sklyanin(&[
        "verify", "sw", "--family", "C", "--rank", "2", "--weight", "quartic", "--oracle", "quadrature", "--order", "4", "--tol", "1e-15",
        "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!read_reports(&report)[0].pass);
}

#[test]
fn mb_and_qmb_checks() {
    let out = sklyanin(&["verify", "mb", "--family", "B", "--rank", "2", "--a", "0.3,-0.21+0.1i,0.13,0.37-0.2i", "--b", "0.17-0.05i", "--z", "0.2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = sklyanin(&[
        "verify", "qmb", "--family", "A", "--rank", "2", "--a", "0.3,-0.21+0.1i,0.53,0.37-0.2i", "--q", "0.5", "--kappa", "2", "--z", "0.2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn config_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("jobs.json");
    let csv = dir.path().join("out.csv");
    fs::write(
        &config,
        r#"[{"command": "verify-sw", "family": "D", "rank": 2, "weight": {"kind": "gaussian"}},
            {"command": "verify-qsw", "family": "C", "rank": 2, "q": 0.3, "weight": {"kind": "geometric", "ratio": 0.5}}]"#,
    )
    .unwrap();
    let out = sklyanin(&["run", config.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("id,mode,pass"));
    assert_eq!(text.lines().count(), 1 + 3);

    fs::write(&config, r#"{"command": "verify-sw", "family": "D", "rank": 2, "weight": {"kind": "gaussian"}, "extra": 1}"#).unwrap();
    assert_eq!(sklyanin(&["run", config.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn sample_dpp_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    let args = ["sample-dpp", "--family", "C", "--rank", "2", "--chains", "4", "--burn-in", "100", "--samples-per-chain", "5", "--out"];
    let out = sklyanin(&[&args[..], &[path.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2"));
    assert_eq!(lines.count(), 20);
}

#[test]
fn seeded_suite_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = sklyanin(&[
            "suite", "--quick", "--seed", "7", "--criterion", "1", "--criterion", "8", "--criterion", "12", "--report", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        without_runtime(&read_reports(&path))
    };
    let first = run("a.json");
    assert!(!first.is_empty());
    assert_eq!(first, run("b.json"));
}
