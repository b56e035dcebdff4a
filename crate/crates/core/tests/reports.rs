use serde_json::Value;

use rpcalc::report::{batch, run, to_json, AssertMode, BatchEntry, RunOptions, Verdict, REPORT_SCHEMA};
use rpcalc::torsion_invariants::{HYPOTHESES_NOT_MET, PREDICTION_MARKER};

fn specs(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn schema_errors(json: &str) -> Vec<String> {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let instance: Value = serde_json::from_str(json).unwrap();
    validator.iter_errors(&instance).map(|e| format!("{} at {}", e, e.instance_path())).collect()
}

#[test]
fn golden_f5_report() {
    let json = to_json(&batch(&specs(&["fq:5"]), &RunOptions::default(), None));
    assert_eq!(json, include_str!("golden/fq5.json"));
}

#[test]
fn reports_validate_against_schema() {
    let opts = RunOptions { include_timing: true, ..RunOptions::default() };
    let entries = batch(&specs(&["fq:2^2", "fq:7", "zmod:3^2", "nonsense", "zmod:2^3"]), &opts, None);
    let errors = schema_errors(&to_json(&entries));
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn schema_rejects_extra_fields() {
    let mut v: Value = serde_json::from_str(&to_json(&batch(&specs(&["fq:5"]), &RunOptions::default(), None))).unwrap();
    v[0]["unexpected"] = Value::Bool(true);
    assert!(!schema_errors(&v.to_string()).is_empty());
    let mut v: Value = serde_json::from_str(&to_json(&batch(&specs(&["fq:5"]), &RunOptions::default(), None))).unwrap();
    v[0]["presentation"]["rp"]["divisors"] = serde_json::json!([-3]);
    assert!(!schema_errors(&v.to_string()).is_empty());
}

#[test]
fn batch_keeps_order_and_localizes_errors() {
    let entries = batch(&specs(&["fq:7", "fq:6", "fq:5", "zmod:4^1"]), &RunOptions::default(), None);
    let rings: Vec<&str> = entries
        .iter()
        .map(|e| match e {
            BatchEntry::Report(r) => r.ring.as_str(),
            BatchEntry::Error { ring, .. } => ring.as_str(),
        })
        .collect();
    assert_eq!(rings, ["fq:7^1", "fq:6", "fq:5^1", "zmod:4^1"]);
    assert!(matches!(entries[1], BatchEntry::Error { .. }));
    assert!(matches!(entries[3], BatchEntry::Error { .. }));
    assert!(!entries.iter().any(BatchEntry::failed_assertion));
}

#[test]
fn empty_batch_is_empty_array() {
    assert_eq!(to_json(&batch(&[], &RunOptions::default(), None)), "[]\n");
}

#[test]
fn prediction_marker_for_large_fields() {
    for (spec, predicted) in [("fq:11", 30), ("fq:13", 42)] {
        let r = run(&spec.parse().unwrap(), &RunOptions::default(), None).unwrap();
        assert_eq!(r.bloch_wigner.marker, PREDICTION_MARKER);
        assert_eq!(r.bloch_wigner.predicted_h3_order, Some(predicted.into()));
        assert!(r.asserted_failures().is_empty());
        let cross = r.check("cross_oracle_rp1").unwrap();
        assert!(cross.asserted);
        assert_eq!(cross.verdict, Verdict::Pass);
    }
    let small = run(&"fq:7".parse().unwrap(), &RunOptions::default(), None).unwrap();
    assert_eq!(small.bloch_wigner.marker, HYPOTHESES_NOT_MET);
}

#[test]
fn small_residue_cross_oracle_is_reported_not_asserted() {
    let r = run(&"zmod:3^2".parse().unwrap(), &RunOptions::default(), None).unwrap();
    assert_eq!(r.presentation.five_term_relations, 0);
    let cross = r.check("cross_oracle_rp").unwrap();
    assert!(!cross.asserted);
    assert!(matches!(cross.verdict, Verdict::Fail { .. }));
    assert!(r.asserted_failures().is_empty());
    assert_eq!(r.presentation.rb.order(), None);
    assert_eq!(r.bloch_wigner.predicted_h3_order, None);
}

#[test]
fn report_only_asserts_less() {
    let opts = RunOptions { assert_mode: AssertMode::ReportOnly, ..RunOptions::default() };
    let r = run(&"fq:11".parse().unwrap(), &opts, None).unwrap();
    for name in ["cross_oracle_rp", "h1_vanishes", "psi1_identities", "psi1_squares_contained"] {
        assert!(!r.check(name).unwrap().asserted, "{name}");
    }
    assert!(r.check("boundary_squared_zero").unwrap().asserted);
}

#[test]
fn size_cap_skips_complex_checks() {
    let opts = RunOptions { point_cap: 10, ..RunOptions::default() };
    let r = run(&"fq:11".parse().unwrap(), &opts, None).unwrap();
    assert!(r.complex.is_none());
    assert!(matches!(r.check("boundary_squared_zero").unwrap().verdict, Verdict::Skipped { .. }));
    assert_eq!(r.errors.len(), 1);
    assert_eq!(r.presentation.rp1.to_string(), "Z/6");
}

#[test]
fn level_two_only_skips_rp_checks() {
    let opts = RunOptions { max_level: 2, ..RunOptions::default() };
    let r = run(&"fq:7".parse().unwrap(), &opts, None).unwrap();
    let c = r.complex.as_ref().unwrap();
    assert_eq!(c.rp, None);
    assert_eq!(c.gw_prime.to_string(), "Z/2 + Z");
    assert!(matches!(r.check("cross_oracle_rp").unwrap().verdict, Verdict::Skipped { .. }));
    assert!(r.asserted_failures().is_empty());
}

#[test]
fn timing_is_opt_in() {
    let plain = to_json(&batch(&specs(&["fq:4"]), &RunOptions::default(), None));
    assert!(!plain.contains("timing_ms"));
    let opts = RunOptions { include_timing: true, ..RunOptions::default() };
    assert!(to_json(&batch(&specs(&["fq:4"]), &opts, None)).contains("timing_ms"));
}
