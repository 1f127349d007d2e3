use statgeom::scenario::{bundled, compile, synthetic};
use statgeom::{bundled_file, bundled_scenario, catalog, lookup, run_scenario, Error, RunOptions, SamplePlan, Verdict};

fn only(names: &[&str]) -> RunOptions {
    RunOptions { checks: Some(names.iter().map(|s| s.to_string()).collect()), ..Default::default() }
}

#[test]
fn every_bundled_example_passes() {
    for id in bundled::IDS {
        let rep = run_scenario(&bundled_scenario(id).unwrap(), &RunOptions::default()).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
        assert!(rep.checks.iter().all(|c| c.verdict != Verdict::Fail));
    }
}

#[test]
fn synthetic_scenarios_pass_except_the_flat_model() {
    for id in synthetic::IDS {
        let rep = run_scenario(&bundled_scenario(id).unwrap(), &RunOptions::default()).unwrap();
        assert_eq!(rep.passed(), id != "tk-model", "{}", rep.to_text());
    }
}

#[test]
fn default_checks_are_listed_then_assertions() {
    let doc = bundled_scenario("E6").unwrap();
    let rep = run_scenario(&doc, &RunOptions::default()).unwrap();
    let names: Vec<&str> = rep.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(&names[..doc.checks.len()], doc.checks.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(names[doc.checks.len()..].iter().all(|n| n.starts_with("assert:")));
    assert_eq!(names.len(), doc.checks.len() + doc.assertions.len());
}

#[test]
fn unknown_checks_are_errors() {
    let doc = bundled_scenario("E1").unwrap();
    assert_eq!(run_scenario(&doc, &only(&["no_such_check"])).unwrap_err(), Error::UnknownCheck("no_such_check".into()));
    assert!(matches!(run_scenario(&doc, &only(&["assert:missing"])), Err(Error::UnknownCheck(_))));
}

#[test]
fn tolerance_override_replaces_scenario_tolerances() {
    let mut file = bundled_file("E2").unwrap();
    file.tolerances.overrides.insert("statistical".into(), 1e-3);
    let doc = compile(&file).unwrap();
    let rep = run_scenario(&doc, &only(&["statistical", "bianchi"])).unwrap();
    assert_eq!(rep.checks[0].tolerance, 1e-3);
    assert_eq!(rep.checks[1].tolerance, file.tolerances.default);

    let tight = RunOptions { tolerance: Some(1e-30), ..only(&["statistical", "bianchi"]) };
    let rep = run_scenario(&doc, &tight).unwrap();
    assert!(rep.checks.iter().all(|c| c.tolerance == 1e-30));

    let loose = RunOptions { tolerance: Some(1e3), ..only(&["eq_o"]) };
    assert!(run_scenario(&doc, &loose).unwrap().passed());
}

#[test]
fn assertion_tolerance_wins_over_the_override() {
    let mut file = bundled_file("E7").unwrap();
    let a = file.assertions.iter_mut().find(|a| a.name == "kappa[x2]").unwrap();
    a.tolerance = Some(0.5);
    a.expr = "1.25".into();
    let doc = compile(&file).unwrap();
    let opts = RunOptions { tolerance: Some(1e-12), ..only(&["assert:kappa[x2]"]) };
    let c = &run_scenario(&doc, &opts).unwrap().checks[0];
    assert_eq!(c.tolerance, 0.5);
    assert_eq!(c.verdict, Verdict::Pass);
    assert!((c.max_residual - 0.25).abs() < 1e-12);
}

#[test]
fn trivial_structure_fails_the_structure_check() {
    let rep = run_scenario(&bundled_scenario("sphere").unwrap(), &only(&["almost_product_like"])).unwrap();
    let c = &rep.checks[0];
    assert_eq!(c.verdict, Verdict::Fail);
    assert!(c.max_residual < 1e-12);
    assert!(c.note.as_deref().unwrap().contains("trivial structure"));
}

#[test]
fn model_constant_is_fitted_when_not_declared() {
    let rep = run_scenario(&bundled_scenario("E2").unwrap(), &only(&["eq_o", "lemma3"])).unwrap();
    let eq = &rep.checks[0];
    assert!(eq.note.as_deref().unwrap().contains("(fitted)"), "{:?}", eq.note);
    assert_eq!(eq.verdict, Verdict::Fail);
    assert_eq!(rep.checks[1].verdict, Verdict::Pass);

    let rep = run_scenario(&bundled_scenario("S2xS2").unwrap(), &only(&["eq_o"])).unwrap();
    assert!(rep.checks[0].note.as_deref().unwrap().contains("5.000000000000e-1 (declared)"));
    assert_eq!(rep.checks[0].verdict, Verdict::Pass);
}

#[test]
fn skipped_checks_carry_reasons() {
    let rep = run_scenario(&bundled_scenario("E2").unwrap(), &only(&["frames", "xi_mu"])).unwrap();
    for c in &rep.checks {
        assert_eq!(c.verdict, Verdict::Skipped);
        assert!(c.reason.is_some());
    }
    assert!(rep.passed());
    let rep = run_scenario(&bundled_scenario("E4").unwrap(), &only(&["xi_mu"])).unwrap();
    assert!(rep.checks[0].reason.as_deref().unwrap().contains("codimension"));
}

#[test]
fn sample_plan_override_changes_points() {
    let doc = bundled_scenario("E1").unwrap();
    let opts = RunOptions { plan: Some(SamplePlan { grid: 0, random: 4, seed: 3 }), ..only(&["projectors"]) };
    let rep = run_scenario(&doc, &opts).unwrap();
    assert_eq!(rep.seed, 3);
    assert_eq!(rep.checks[0].points.len(), 4);
}

#[test]
fn flat_model_violates_the_tangential_consequence() {
    let rep = run_scenario(&bundled_scenario("tk-model").unwrap(), &only(&["tk_identities"])).unwrap();
    let c = &rep.checks[0];
    assert_eq!(c.verdict, Verdict::Fail);
    let flat = c.identities.iter().find(|(k, _)| k.contains("flat")).unwrap();
    assert!((flat.1 - 0.25).abs() < 1e-12, "{flat:?}");
}

#[test]
fn catalog_names_are_unique_and_resolvable() {
    let names: Vec<&str> = catalog().iter().map(|c| c.name).collect();
    let mut sorted = names.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), names.len());
    for n in names {
        assert_eq!(lookup(n).unwrap().name, n);
    }
    assert!(lookup("nope").is_none());
}
