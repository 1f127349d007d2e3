use proptest::prelude::*;

use statgeom::geometry::{AmbientJets, ConnectionKind};
use statgeom::report::{PointRecord, Real};
use statgeom::scenario::{bundled, compile, synthetic};
use statgeom::{
    bundled_file, bundled_scenario, load_scenario, run_scenario, validate_scenario, CheckReport, Error, RunOptions,
    RunReport, Verdict,
};

fn all_ids() -> Vec<&'static str> {
    bundled::IDS.iter().chain(synthetic::IDS.iter()).copied().collect()
}

fn flat(metric: &str, extra: &str) -> String {
    format!(
        r#"{{
  "name": "t",
  "manifold": {{ "dim": 2, "coords": ["x", "y"], "box": [[-1, 1], [-1, 1]], "metric": {metric} }}{extra}
}}"#
    )
}

#[test]
fn malformed_metric_shape_names_the_field() {
    let text = r#"{
  "name": "t",
  "manifold": { "dim": 3, "coords": ["x", "y", "z"], "box": [[-1, 1], [-1, 1], [-1, 1]],
    "metric": [["1","0","0","0"], ["0","1","0","0"], ["0","0","1","0"]] }
}"#;
    match load_scenario(text) {
        Err(Error::Dimension { field, .. }) => assert!(field.contains("metric"), "{field}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let err = load_scenario(&flat(r#"[["1","0"],["0","1"]]"#, r#", "colour": "red""#)).unwrap_err();
    assert!(matches!(&err, Error::Schema { message, .. } if message.contains("colour")), "{err:?}");
}

#[test]
fn bad_expressions_report_path_and_offset() {
    let err = load_scenario(&flat(r#"[["1","0"],["0","1 + * y"]]"#, "")).unwrap_err();
    match err {
        Error::Schema { path, message } => {
            assert_eq!(path, "manifold.metric[1][1]");
            assert!(message.contains("byte 4"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    let err = load_scenario(&flat(r#"[["1","0"],["0","exp(w)"]]"#, "")).unwrap_err();
    assert!(matches!(&err, Error::Schema { message, .. } if message.contains("`w`")), "{err:?}");
}

#[test]
fn probe_diagnostics() {
    let err = load_scenario(&flat(r#"[["1","1"],["1","1"]]"#, "")).unwrap_err();
    assert!(matches!(&err, Error::Schema { message, .. } if message.contains("singular metric")), "{err:?}");

    let mut f = bundled_file("E5").unwrap();
    f.immersion.as_mut().unwrap().map = vec!["x1".into(), "x1".into(), "x3".into(), "0".into()];
    let doc = compile(&f).unwrap();
    let diags = validate_scenario(&doc);
    assert_eq!(diags.len(), 1);
    assert!(diags[0].contains("rank deficiency"), "{diags:?}");
    assert!(validate_scenario(&bundled_scenario("E5").unwrap()).is_empty());
}

#[test]
fn unknown_bundled_id() {
    assert!(matches!(bundled_scenario("E9"), Err(Error::UnknownBundled(_))));
}

#[test]
fn listed_connection_coefficients_at_origin() {
    let doc = bundled_scenario("E2").unwrap();
    let gamma = AmbientJets::at(&doc.geom, &[0.0; 4]).unwrap().connection(ConnectionKind::Primal).gamma;
    assert_eq!(gamma[[0, 0, 0]], 1.0);
    assert_eq!(gamma[[2, 0, 0]], 1.0);
    assert_eq!(gamma[[1, 0, 0]], 0.0);
    assert_eq!(gamma[[3, 1, 1]], -1.0);
}

#[test]
fn structure_one_form_on_the_fibre_is_asserted_constant() {
    let doc = bundled_scenario("E7").unwrap();
    let a = doc.assertions.iter().find(|a| a.name == "kappa[x2]").unwrap();
    assert_eq!(a.expr.eval_value(&[0.4, -0.3, 0.9]).unwrap(), 1.0);
    let rep = run_scenario(&doc, &RunOptions { checks: Some(vec!["assert:kappa[x2]".into()]), ..Default::default() }).unwrap();
    assert_eq!(rep.checks[0].verdict, Verdict::Pass);
}

#[test]
fn emitted_documents_reload_identically() {
    for id in all_ids() {
        let file = bundled_file(id).unwrap();
        let doc = load_scenario(&file.to_json()).unwrap();
        assert_eq!(doc, compile(&file).unwrap(), "{id}");
        let again: statgeom::ScenarioFile = serde_json::from_str(&file.to_json()).unwrap();
        assert_eq!(again.to_json(), file.to_json(), "{id}");
    }
}

#[test]
fn reports_are_deterministic() {
    for id in ["E2", "E5", "S2xS2-tangential"] {
        let doc = bundled_scenario(id).unwrap();
        let a = run_scenario(&doc, &RunOptions::default()).unwrap().to_json();
        let b = run_scenario(&doc, &RunOptions::default()).unwrap().to_json();
        assert_eq!(a, b, "{id}");
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["scenario"], id);
        assert_eq!(v["seed"], 42);
    }
}

proptest! {
    #[test]
    fn verdict_follows_the_residual_rule(
        res in prop::collection::vec(prop_oneof![9 => 0.0f64..1.0, 1 => Just(f64::NAN)], 0..6),
        tol in 1e-6f64..1.0,
    ) {
        let points: Vec<PointRecord> = res.iter().map(|&r| PointRecord { x: vec![Real(0.0)], residual: Real(r) }).collect();
        let c = CheckReport::from_residuals("c", tol, points, Vec::new());
        let has_nan = res.iter().any(|r| r.is_nan());
        let max = res.iter().copied().fold(0.0, f64::max);
        if has_nan {
            prop_assert!(c.max_residual.is_nan());
            prop_assert_eq!(c.verdict, Verdict::Fail);
        } else {
            prop_assert_eq!(c.max_residual, max);
            prop_assert_eq!(c.verdict == Verdict::Pass, max < tol);
        }
        let run = RunReport::new("s", 1, vec![c.clone(), CheckReport::skipped("k", tol, "n/a")]);
        prop_assert_eq!(run.passed(), c.verdict == Verdict::Pass);
        let json: serde_json::Value = serde_json::from_str(&run.to_json()).unwrap();
        prop_assert_eq!(json["checks"][1]["verdict"].as_str(), Some("skipped"));
    }
}
