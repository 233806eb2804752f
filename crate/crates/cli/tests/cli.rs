use std::process::{Command, Output};

use deltaiso_cli::AnalysisReport;

fn deltaiso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltaiso")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn witt_calculator() {
    let o = deltaiso(&["witt", "--p", "5", "[1,0] + [1,0]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[2, -6]\nghost (2, 2)\n");
    assert!(stdout(&deltaiso(&["witt", "--p", "5", "T([1,2,3])"])).starts_with("[1, 2]\n"));
    assert!(stdout(&deltaiso(&["witt", "--p", "5", "F([2,-6])"])).starts_with("[2]\n"));
    let j: serde_json::Value = serde_json::from_str(&stdout(&deltaiso(&["witt", "--json", "[3] * [4]"]))).unwrap();
    assert_eq!(j["components"], serde_json::json!([12]));
}

#[test]
fn bad_input_exits_2() {
    for args in [
        &["witt", "[1,"][..],
        &["witt", "[1,2] + [1]"],
        &["witt", "--p", "4", "[1]"],
        &["analyze", "--curve", "0,0", "--p", "5"],
        &["kedlaya", "--curve", "1,x"],
        &["kedlaya", "--curve", "1,1", "--p", "3"],
        &["verify", "--group", "curve"],
        &["verify", "--order", "3", "--group", "gm"],
        &["frobnicate"],
    ] {
        assert_eq!(deltaiso(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn precision_exhausted_exits_3() {
    // order 2 on a curve needs M >= p^2 + p
    let o = deltaiso(&["characters", "--group", "curve", "--curve", "1,1", "--order", "2", "--deg", "20"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_multiplicative_and_additive() {
    let o = deltaiso(&["verify", "--group", "gm", "--p", "5", "--prec", "8", "--deg", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let o = deltaiso(&["verify", "--group", "ga", "--p", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(j["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn verify_is_deterministic_in_the_seed() {
    let a = deltaiso(&["verify", "--group", "ga", "--seed", "7", "--json"]);
    let b = deltaiso(&["verify", "--group", "ga", "--seed", "7", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn kedlaya_subcommand() {
    let o = deltaiso(&["kedlaya", "--curve", "0,1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["a_p"], 0);
    assert_eq!(j["slopes"], serde_json::json!(["1/2", "1/2"]));
    assert_eq!(j["hodge_intersection"], 0);
}

#[test]
fn analyze_supersingular_round_trips() {
    let o = deltaiso(&["analyze", "--curve", "0,1", "--p", "5", "--prec", "8", "--deg", "35", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let r = AnalysisReport::from_json(&text).unwrap();
    assert_eq!((r.ranks.x1, r.ranks.x2, r.ranks.x_prim), (0, 1, 1));
    assert_eq!((r.m_u, r.delta_rank, r.is_cl, r.a_p, r.ordinary), (2, 2, false, 0, false));
    assert_eq!(r.filtration_dims, vec![1, 2, 2]);
    assert_eq!(AnalysisReport::from_json(&r.to_json()).unwrap(), r);
    assert_eq!(serde_json::from_str::<serde_json::Value>(&r.to_json()).unwrap(), serde_json::from_str::<serde_json::Value>(&text).unwrap());
}
