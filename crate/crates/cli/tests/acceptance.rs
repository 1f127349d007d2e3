//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails when a criterion fails that is not listed in
//! `EXPECTED_FAILURES`, or when a listed one unexpectedly passes.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use statgeom::geometry::dual_connection_at;
use statgeom::oracle::{fd_gradient, random_expression, relative_error};
use statgeom::scenario::synthetic::random_statistical;
use statgeom::scenario::{bundled, compile, synthetic, AssertionFile};
use statgeom::{bundled_file, bundled_scenario, run_scenario, ExprTree, RunOptions, RunReport, SamplePlan, ScenarioDoc, Verdict};

/// Criteria whose target value the computation contradicts. See the README.
const EXPECTED_FAILURES: &[u32] = &[5];

const HP: &str = "exp((x1-x3)/2)";
const HM: &str = "exp(-(x1-x3)/2)";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn plan25() -> SamplePlan {
    SamplePlan { grid: 0, random: 25, seed: 42 }
}

fn run(doc: &ScenarioDoc, checks: Vec<String>, tol: f64, plan: Option<SamplePlan>) -> RunReport {
    let opts = RunOptions { checks: Some(checks), tolerance: Some(tol), plan };
    run_scenario(doc, &opts).expect("scenario runs")
}

fn worst(rep: &RunReport) -> f64 {
    rep.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max)
}

fn failing(rep: &RunReport) -> Vec<String> {
    rep.checks
        .iter()
        .filter(|c| c.verdict != Verdict::Pass)
        .map(|c| format!("{} ({:?})", c.name, c.verdict))
        .collect()
}

fn asserts(doc: &ScenarioDoc, keep: impl Fn(&str) -> bool) -> Vec<String> {
    doc.assertions.iter().filter(|a| keep(&a.name)).map(|a| a.check_name()).collect()
}

fn summary(rep: &RunReport, n: usize) -> Outcome {
    let bad = failing(rep);
    outcome(bad.is_empty(), format!("{n} checks, max residual {:.2e}{}", worst(rep), listing(&bad)))
}

fn listing(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; not passing: {}", bad.join(", "))
    }
}

fn conjugate_structure() -> Outcome {
    let doc = bundled_scenario("E1").unwrap();
    let rep = run(&doc, vec!["expected_F_star".into()], 1e-10, Some(plan25()));
    let c = &rep.checks[0];
    outcome(
        c.verdict == Verdict::Pass && c.points.len() == 25,
        format!("{} points, max residual {:.2e}", c.points.len(), c.max_residual),
    )
}

fn dual_connection() -> Outcome {
    let doc = bundled_scenario("E2").unwrap();
    let checks = asserts(&doc, |n| n.starts_with("ambient.nabla_star["));
    let n = checks.len();
    let rep = run(&doc, checks, 1e-9, Some(plan25()));
    let gamma = dual_connection_at(&doc.geom, &[0.0; 4]).unwrap().gamma;
    let spots = [(gamma[[0, 0, 0]], -1.5), (gamma[[0, 1, 1]], 0.5), (gamma[[2, 1, 1]], 2.0)];
    let spot = spots.iter().fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let mut o = summary(&rep, n);
    o.pass &= n == 64 && spot < 1e-12;
    o.detail += &format!("; origin spot values off by {spot:.1e}");
    o
}

fn locally_product_like() -> Outcome {
    let doc = bundled_scenario("E2").unwrap();
    let checks = ["statistical", "nabla_F", "curvature_duality"].map(String::from).to_vec();
    summary(&run(&doc, checks, 1e-8, None), 3)
}

fn submanifold_tables() -> Outcome {
    let e4 = bundled_scenario("E4").unwrap();
    let mut checks = vec!["totally_geodesic".to_string()];
    checks.extend(asserts(&e4, |n| n.starts_with("D[") || n.starts_with("D_star[")));
    let n4 = checks.len();
    let r4 = run(&e4, checks, 1e-9, None);
    let e5 = bundled_scenario("E5").unwrap();
    let checks = asserts(&e5, |n| {
        n.starts_with("sigma[x2,x2].") || n.starts_with("A[n:x4,x2].") || n.starts_with("D[x2,n:x4].")
    });
    let n5 = checks.len();
    let r5 = run(&e5, checks, 1e-9, None);
    let mut bad = failing(&r4);
    bad.extend(failing(&r5));
    outcome(
        bad.is_empty() && n4 == 17 && n5 == 5,
        format!("{} checks, max residual {:.2e}{}", n4 + n5, worst(&r4).max(worst(&r5)), listing(&bad)),
    )
}

/// The listed ∇_{∂2}ξ = −e^{(x1−x3)/2}(∂2+∂3)+ξ, one assertion per component.
fn listed_nabla_xi() -> Vec<AssertionFile> {
    let x2 = format!("{HM}-{HP}");
    let x3 = format!("-{HP}");
    [("x1", "0"), ("x2", x2.as_str()), ("x3", x3.as_str())]
        .into_iter()
        .map(|(c, e)| AssertionFile {
            name: format!("listed_nabla_xi[x2].{c}"),
            target: format!("nabla_xi[x2].{c}"),
            expr: e.to_string(),
            tolerance: None,
        })
        .collect()
}

fn hypersurface_tables() -> Outcome {
    let mut file = bundled_file("E7").unwrap();
    file.assertions.extend(listed_nabla_xi());
    let doc = compile(&file).unwrap();
    let tables = asserts(&doc, |n| {
        n == "kappa[x1]" || n == "kappa[x2]" || n.starts_with("A_N[x2].") || n.starts_with("nabla_phi[")
    });
    let corrected = asserts(&doc, |n| n.starts_with("nabla_xi[x2]."));
    let listed = asserts(&doc, |n| n.starts_with("listed_nabla_xi"));
    let rt = run(&doc, tables.clone(), 1e-8, None);
    let rc = run(&doc, corrected, 1e-8, None);
    let rl = run(&doc, listed, 1e-8, None);
    let tables_ok = failing(&rt).is_empty() && tables.len() == 32;
    let pass = tables_ok && rl.passed();
    outcome(
        pass,
        format!(
            "{} table checks max residual {:.2e}; listed ∇_{{∂2}}ξ max residual {:.2e} ({}); \
             −e^{{(x1−x3)/2}}(∂1+∂3)+ξ max residual {:.2e} ({})",
            tables.len(),
            worst(&rt),
            worst(&rl),
            rl.overall.label(),
            worst(&rc),
            rc.overall.label(),
        ),
    )
}

fn identity_suites() -> Outcome {
    let suites = ["lemma7", "structure_curvature", "prop5a", "prop8a", "curvature_xi", "para_contact_like"];
    let ids: Vec<&str> = bundled::IDS.iter().chain(synthetic::IDS.iter()).copied().collect();
    let mut evaluated = vec![0usize; suites.len()];
    let mut bad = Vec::new();
    let mut max: f64 = 0.0;
    for id in ids {
        let doc = bundled_scenario(id).unwrap();
        let mine: Vec<String> = suites.iter().filter(|s| doc.checks.iter().any(|c| c == *s)).map(|s| s.to_string()).collect();
        if mine.is_empty() {
            continue;
        }
        let rep = run(&doc, mine, 1e-6, None);
        for c in &rep.checks {
            let i = suites.iter().position(|s| *s == c.name).unwrap();
            match c.verdict {
                Verdict::Pass => {
                    evaluated[i] += 1;
                    max = max.max(c.max_residual);
                }
                Verdict::Fail => bad.push(format!("{id}:{}", c.name)),
                Verdict::Skipped => {}
            }
        }
    }
    let covered = evaluated.iter().all(|&n| n > 0);
    let counts: Vec<String> = suites.iter().zip(&evaluated).map(|(s, n)| format!("{s}×{n}")).collect();
    outcome(
        bad.is_empty() && covered,
        format!("{}; max residual {max:.2e}{}", counts.join(" "), listing(&bad)),
    )
}

fn ad_vs_fd() -> Outcome {
    let coords: Vec<String> = ["x1", "x2", "x3"].iter().map(|s| s.to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let e = ExprTree::parse(&random_expression(&mut rng, &coords, 4), &coords).unwrap();
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.5..1.5)).collect();
        let g = e.eval_jet(&p).unwrap().gradient;
        let fd = fd_gradient(|q| e.eval_value(q).unwrap(), &p, 1e-5);
        worst = g.iter().zip(&fd).fold(worst, |w, (a, b)| w.max(relative_error(*a, *b)));
    }
    outcome(worst <= 1e-6, format!("500 expressions, max relative gradient error {worst:.2e}"))
}

fn dual_involution() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let doc = random_statistical(1000 + seed, 3);
        let rep = run(&doc, vec!["dual_involution".into()], 1e-10, None);
        worst = worst.max(rep.checks[0].max_residual);
    }
    outcome(worst <= 1e-10, format!("50 scenarios, max residual {worst:.2e}"))
}

fn no_nonflat_constant_curvature() -> Outcome {
    let mut evaluated = Vec::new();
    let mut bad = Vec::new();
    for id in bundled::IDS.iter().chain(synthetic::IDS.iter()) {
        let doc = bundled_scenario(id).unwrap();
        if doc.geom.structure.is_none() {
            continue;
        }
        let rep = run(&doc, vec!["lemma3".into()], doc.tolerance, None);
        let c = &rep.checks[0];
        match c.verdict {
            Verdict::Skipped => {}
            Verdict::Pass => evaluated.push(*id),
            Verdict::Fail => bad.push(format!("{id}: {}", c.note.clone().unwrap_or_default())),
        }
    }
    outcome(
        bad.is_empty() && !evaluated.is_empty(),
        format!("evaluated on {}{}", evaluated.join(", "), listing(&bad)),
    )
}

fn flatness_diagnosis() -> Outcome {
    let doc = bundled_scenario("tk-model").unwrap();
    let rep = run_scenario(&doc, &RunOptions { checks: Some(vec!["tk_identities".into()]), ..Default::default() }).unwrap();
    let c = &rep.checks[0];
    let flat = c.identities.iter().find(|(k, _)| k.contains("flat")).map(|(_, v)| *v);
    let fired = c.verdict == Verdict::Fail && flat.is_some_and(|v| v > 1e-8);
    let shown = flat.map_or("missing".to_string(), |v| format!("{v:.3e}"));
    outcome(fired, format!("verdict {}, flatness residual {shown}", c.verdict.label()))
}

fn property_based() -> Outcome {
    let parts = [
        ("a", ad_vs_fd()),
        ("b", dual_involution()),
        ("c", no_nonflat_constant_curvature()),
        ("d", flatness_diagnosis()),
    ];
    let pass = parts.iter().all(|(_, o)| o.pass);
    let detail: Vec<String> = parts
        .iter()
        .map(|(k, o)| format!("({k}) {} {}", if o.pass { "ok" } else { "FAILED" }, o.detail))
        .collect();
    outcome(pass, detail.join("; "))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_statgeom");
    let once = || {
        Command::new(bin)
            .args(["verify", "--bundled", "E7", "--report", "json"])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (once(), once());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(
        same && a.status.success(),
        format!("{} bytes, identical: {same}, exit {:?}", a.stdout.len(), a.status.code()),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "conjugate structure reproduction", conjugate_structure),
        (2, "dual connection reproduction", dual_connection),
        (3, "locally product-like verification", locally_product_like),
        (4, "submanifold tables", submanifold_tables),
        (5, "hypersurface tables", hypersurface_tables),
        (6, "identity suites", identity_suites),
        (7, "property-based checks", property_based),
        (8, "determinism", determinism),
    ];
    let mut unexpected = 0;
    for (n, name, f) in criteria {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let expected_fail = EXPECTED_FAILURES.contains(&n);
        let tag = match (o.pass, expected_fail) {
            (true, false) => "",
            (false, true) => "  [expected]",
            (false, false) => "  [unexpected]",
            (true, true) => "  [unexpected pass]",
        };
        if o.pass == expected_fail {
            unexpected += 1;
        }
        println!("{} criterion {n}: {name}{tag} ({secs:.2}s) - {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
