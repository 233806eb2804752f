//! Replays the checked-in fuzz seeds through the parsers the fuzz targets drive.

use std::fs;
use std::path::PathBuf;

use deltaiso::formalgroup::WeierstrassCurve;
use deltaiso::Context;
use deltaiso_cli::{expr, AnalysisReport};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|f| fs::read_to_string(f.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn witt_expr_seeds_evaluate() {
    for s in seeds("witt_expr") {
        let e = expr::parse(&s).unwrap();
        assert!(expr::eval(&e, 5, 8).is_ok(), "{s}");
    }
}

#[test]
fn curve_spec_seeds_round_trip() {
    let ctx = Context::new(5, 8, 12).unwrap();
    for s in seeds("curve_spec") {
        let e = WeierstrassCurve::parse(&s, &ctx).unwrap();
        assert_eq!(WeierstrassCurve::parse(&e.to_string(), &ctx).unwrap(), e);
    }
}

#[test]
fn report_json_seeds_round_trip() {
    for s in seeds("report_json") {
        let r = AnalysisReport::from_json(&s).unwrap();
        assert_eq!(AnalysisReport::from_json(&r.to_json()).unwrap(), r);
    }
}
