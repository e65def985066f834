use std::path::Path;
use std::process::{Command, Output};

use hirschlab_cli::{run_suite, CliError, Record, Report, Status, SuiteConfig, SuiteId};
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hirschlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("HIRSCHLAB_JOBS").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const D_SQUARED: &str = r#"{"min_deg":0,"max_deg":2,"spaces":{"0":["a"],"1":["b"],"2":["c"]},
"d":{"0":{"rows":1,"cols":1,"entries":[[0,0,"1"]]},"1":{"rows":1,"cols":1,"entries":[[0,0,"1"]]}}}"#;

#[test]
fn canned_artifacts_survive_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    for model in ["log_point", "nilpotent_rank2", "xy_snc", "xyz_snc", "two_log_vars", "xy_nilpotent"] {
        for artifact in ["model", "datum", "relative", "diagram"] {
            let out = run(&["canned", model, "--artifact", artifact, "--degree-bound", "2"]);
            assert_eq!(code(&out), 0, "{model}/{artifact}: {}", stderr(&out));
            let path = write(dir.path(), &format!("{model}-{artifact}.json"), &String::from_utf8_lossy(&out.stdout));
            let rt = run(&["roundtrip", &path]);
            assert_eq!(code(&rt), 0, "{model}/{artifact}: {}", stderr(&rt));
            assert!(String::from_utf8_lossy(&rt.stdout).contains("identical"));
        }
    }
}

#[test]
fn nonzero_d_squared_is_a_validation_error_naming_the_degree() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "dsq.json", D_SQUARED);
    let out = run(&["roundtrip", &path]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("validation error") && err.contains("degree 0"), "{err}");
}

#[test]
fn zero_denominator_is_a_parse_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "zero.json", &D_SQUARED.replacen(r#"[0,0,"1"]"#, r#"[0,0,"1/0"]"#, 1));
    let out = run(&["roundtrip", &path]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("parse error at line 2"), "{err}");
}

#[test]
fn truncated_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "cut.json", "{\"n\": 1,\n \"r\": ");
    let out = run(&["run", "--suite", "residue", "--model-file", &path]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("parse error at line 2"), "{}", stderr(&out));
}

#[test]
fn exit_code_contract() {
    assert_eq!(code(&run(&["run", "--suite", "cone-sign"])), 0);
    assert_eq!(code(&run(&["run", "--suite", "cone-sign", "--inject-fault", "flip-cone-sign"])), 1);
    assert_eq!(code(&run(&["run", "--suite", "comparison", "--model", "xy_snc", "--inject-fault", "corrupt-restriction-sign"])), 1);
    assert_eq!(code(&run(&["run", "--suite", "no-such-suite"])), 2);
    assert_eq!(code(&run(&["run", "--suite", "cone-sign", "--truncation", "2", "--i-max", "4"])), 2);
    assert_eq!(code(&run(&["run", "--suite", "residue", "--model", "no_such_model"])), 2);
    assert_eq!(code(&run(&["run", "--suite", "residue", "--model-file", "/nonexistent/model.json"])), 2);
}

#[test]
fn inconclusive_only_reports_exit_three() {
    let rec = |status| Record { id: "x".into(), anchor: "a".into(), status, evidence: Value::Null, wall_ms: 0.0 };
    let cfg = SuiteConfig::default();
    assert_eq!(Report::new(cfg.clone(), vec![rec(Status::Pass), rec(Status::Inconclusive)]).exit_code(), 3);
    assert_eq!(Report::new(cfg.clone(), vec![rec(Status::Fail), rec(Status::Inconclusive)]).exit_code(), 1);
    assert_eq!(Report::new(cfg, vec![rec(Status::Pass)]).exit_code(), 0);
}

#[test]
fn reports_are_identical_apart_from_wall_times() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str, jobs: &str| -> Value {
        let path = dir.path().join(name);
        let out = run(&["run", "--suite", "cone-sign", "--suite", "cech-resolution", "--jobs", jobs, "--report", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        for r in v["records"].as_array_mut().unwrap() {
            r["wall_ms"] = json!(0);
        }
        v["config"]["jobs"] = Value::Null;
        v
    };
    let a = read("a.json", "1");
    let b = read("b.json", "4");
    assert_eq!(a, b);
    assert_eq!(a["schema"], "hirschlab-report/1");
    assert!(a["records"].as_array().unwrap().iter().all(|r| r["anchor"].as_str().is_some_and(|s| !s.is_empty())));
}

#[test]
fn model_file_runs_with_its_own_degree_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["canned", "xy_snc", "--degree-bound", "2"]);
    let path = write(dir.path(), "xy.json", &String::from_utf8_lossy(&out.stdout));
    let out = run(&["run", "--suite", "cech-resolution", "--model-file", &path]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("cech-resolution/xy"));
}

#[test]
fn config_errors_are_distinct_from_failures() {
    let bad = SuiteConfig { window: 0, ..SuiteConfig::for_suite(SuiteId::ConeSign) };
    assert!(matches!(run_suite(&bad), Err(CliError::Config(_))));
    let bad = SuiteConfig { suites: vec![], ..Default::default() };
    assert!(matches!(run_suite(&bad), Err(CliError::Config(_))));
    let both = SuiteConfig {
        model: Some("xy_snc".into()),
        model_file: Some("m.json".into()),
        ..SuiteConfig::for_suite(SuiteId::Residue)
    };
    assert!(matches!(run_suite(&both), Err(CliError::Config(_))));
}
