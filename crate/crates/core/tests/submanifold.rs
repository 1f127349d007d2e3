use proptest::prelude::*;

use statgeom::geometry::ConnectionKind;
use statgeom::scenario::assertions::{PointData, Target};
use statgeom::scenario::bundled::with_slice_constants;
use statgeom::scenario::compile;
use statgeom::submanifold::identities::{lemma7_residuals, View};
use statgeom::submanifold::InducedGeometryAt;
use statgeom::{bundled_file, bundled_scenario, run_scenario, Error, RunOptions, SamplePlan, ScenarioDoc, Verdict};

fn point(doc: &ScenarioDoc, u: &[f64]) -> PointData {
    PointData::compute(&doc.geom, doc.immersion.as_ref(), u).unwrap()
}

fn value(doc: &ScenarioDoc, pd: &PointData, target: &str) -> f64 {
    Target::parse(target, &doc.geom.coords, doc.immersion.as_ref())
        .unwrap()
        .eval(pd)
        .unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

fn induced(doc: &ScenarioDoc, u: &[f64]) -> InducedGeometryAt {
    InducedGeometryAt::compute(&doc.geom, doc.immersion.as_ref().unwrap(), u).unwrap()
}

#[test]
fn slice_frames_and_induced_metric() {
    let e3 = bundled_scenario("E3").unwrap();
    let ig = induced(&e3, &[0.0, 0.0]);
    assert_eq!(ig.frame.tangent, vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]]);
    let m = &ig.values.metric;
    assert!(close(m[[0, 0]], 2.0) && close(m[[1, 1]], 1.0) && close(m[[0, 1]], 0.0));
    // Normals are g̃-orthonormal and span the ∂2, ∂4 plane.
    let g = &ig.values.ambient_metric;
    for (a, na) in ig.frame.normal.iter().enumerate() {
        assert!(close(na[0], 0.0) && close(na[2], 0.0));
        for (b, nb) in ig.frame.normal.iter().enumerate() {
            let p: f64 = (0..4).map(|i| (0..4).map(|j| na[i] * g[[i, j]] * nb[j]).sum::<f64>()).sum();
            assert!(close(p, if a == b { 1.0 } else { 0.0 }));
        }
    }

    let e5 = bundled_scenario("E5").unwrap();
    let m = induced(&e5, &[0.0; 3]).values.metric;
    for (i, want) in [2.0, 1.0, 1.0].into_iter().enumerate() {
        assert!(close(m[[i, i]], want));
    }
}

#[test]
fn hypersurface_slice_values_at_origin() {
    let doc = bundled_scenario("E5").unwrap();
    let pd = point(&doc, &[0.0; 3]);
    assert!(close(value(&doc, &pd, "sigma[x2,x2].n:x4"), -1.0));
    for c in ["x1", "x2", "x3"] {
        assert!(close(value(&doc, &pd, &format!("A[n:x4,x2].{c}")), 1.0));
    }
    let mut trace = 0.0;
    for x in ["x1", "x2", "x3"] {
        for c in ["x1", "x2", "x3"] {
            let a = value(&doc, &pd, &format!("A[n:x4,{x}].{c}"));
            let a_star = value(&doc, &pd, &format!("A_star[n:x4,{x}].{c}"));
            assert!(close(a_star, -a), "{x} {c}");
            if x == c {
                trace += a;
            }
        }
    }
    assert!(close(trace, 1.0));
    assert!(close(value(&doc, &pd, "D[x2,n:x4].n:x4"), 1.0));
    // D + D* = ∂1 log g44 along ∂1.
    let d = value(&doc, &pd, "D[x1,n:x4].n:x4");
    let ds = value(&doc, &pd, "D_star[x1,n:x4].n:x4");
    assert!(close(d, -1.0) && close(d + ds, 1.0));
}

/// D_X V is the normal part of ∇̃_X V; for coordinate fields that is Γ̃^k_ij ∂k.
#[test]
fn normal_connection_matches_ambient_christoffels() {
    let doc = bundled_scenario("E4").unwrap();
    for u in [[0.0, 0.0], [0.3, -0.4], [-0.7, 0.2]] {
        let pd = point(&doc, &u);
        let ig = pd.ig.as_ref().unwrap();
        let gamma = pd.ambient.connection(ConnectionKind::Primal).gamma;
        for (xi, xname) in [(0usize, "x1"), (2, "x3")] {
            for (vi, vname) in [(1usize, "x2"), (3, "x4")] {
                let w: Vec<f64> = (0..4).map(|k| gamma[[k, xi, vi]]).collect();
                let (_, nrm) = ig.values.split(&w);
                let amb = ig.values.normal_to_ambient(&nrm);
                for (ci, cname) in [(1usize, "x2"), (3, "x4")] {
                    let got = value(&doc, &pd, &format!("D[{xname},n:{vname}].n:{cname}"));
                    assert!((got - amb[ci]).abs() < 1e-12, "{u:?} D[{xname},{vname}].{cname}");
                }
            }
        }
    }
    let pd = point(&doc, &[0.0, 0.0]);
    assert!(close(value(&doc, &pd, "D[x1,n:x2].n:x2"), -1.0));
    assert!(close(value(&doc, &pd, "D[x1,n:x2].n:x4"), -2.0));
}

#[test]
fn immersion_errors() {
    let mut f = bundled_file("E5").unwrap();
    let im = f.immersion.as_mut().unwrap();
    im.dim = 4;
    im.coords = vec!["x1".into(), "x2".into(), "x3".into(), "x4".into()];
    im.bbox.push([-1.0, 1.0]);
    im.map[3] = "x4".into();
    let doc = compile(&f);
    let err = match doc {
        Err(e) => e,
        Ok(d) => InducedGeometryAt::compute(&d.geom, d.immersion.as_ref().unwrap(), &[0.0; 4]).unwrap_err(),
    };
    assert!(matches!(err, Error::NoNormalSpace { m: 4, n: 4 }), "{err:?}");

    let mut f = bundled_file("E6").unwrap();
    f.immersion.as_mut().unwrap().normals = Some(vec![vec!["0".into(), "1".into(), "0".into(), "1".into()]]);
    let d = compile(&f).unwrap();
    let err = InducedGeometryAt::compute(&d.geom, d.immersion.as_ref().unwrap(), &[0.0; 3]).unwrap_err();
    assert!(matches!(err, Error::NormalNotOrthogonal { index: 0, .. }), "{err:?}");

    let mut f = bundled_file("E5").unwrap();
    f.immersion.as_mut().unwrap().map[2] = "x1".into();
    let d = compile(&f).unwrap();
    let err = InducedGeometryAt::compute(&d.geom, d.immersion.as_ref().unwrap(), &[0.0; 3]).unwrap_err();
    assert!(matches!(err, Error::RankDeficient { .. }), "{err:?}");
}

#[test]
fn structure_identities_need_parallel_structure() {
    let doc = bundled_scenario("E5").unwrap();
    let ig = induced(&doc, &[0.2, 0.1, -0.3]);
    let worst = |ig: &InducedGeometryAt| lemma7_residuals(ig).iter().fold(0.0f64, |a, r| a.max(r.1));
    assert!(worst(&ig) < 1e-10);

    let mut f = bundled_file("E5").unwrap();
    f.structure.as_mut().unwrap().f[0][2] = "1+0.2*x2".into();
    f.structure.as_mut().unwrap().expected_f_star = None;
    let bent = compile(&f).unwrap();
    assert!(worst(&induced(&bent, &[0.2, 0.1, -0.3])) > 1e-3);
    let opts = RunOptions { checks: Some(vec!["lemma7".into()]), ..Default::default() };
    let rep = run_scenario(&bent, &opts).unwrap();
    assert_eq!(rep.checks[0].verdict, Verdict::Skipped);
}

#[test]
fn dual_shape_operator_is_metric_adjoint_of_second_form() {
    // g(A*_V X, Y) = g̃(σ(X, Y), V) with the normal frame orthonormal.
    let doc = bundled_scenario("E5").unwrap();
    let ig = induced(&doc, &[0.4, -0.2, 0.1]);
    let (p, d) = (View::new(&ig.primal, &ig.values), View::new(&ig.dual, &ig.values));
    for a in 0..3 {
        for b in 0..3 {
            let (x, y) = (ig.values.basis(a), ig.values.basis(b));
            let lhs = ig.values.g(&d.shape(&[1.0], &x), &y);
            let rhs = p.sigma(&x, &y)[0];
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// The slice examples do not depend on where the fixed coordinates sit.
    #[test]
    fn slice_constants_do_not_matter(c in -1.0f64..1.0, id in prop::sample::select(vec!["E5", "E6", "E7"])) {
        let doc = compile(&with_slice_constants(id, &[c]).unwrap()).unwrap();
        let opts = RunOptions { plan: Some(SamplePlan { grid: 0, random: 3, seed: 5 }), ..Default::default() };
        let rep = run_scenario(&doc, &opts).unwrap();
        prop_assert!(rep.passed(), "{}", rep.to_text());
    }

    #[test]
    fn two_dimensional_slices_do_not_depend_on_constants(a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let doc = compile(&with_slice_constants("E4", &[a, b]).unwrap()).unwrap();
        let opts = RunOptions { plan: Some(SamplePlan { grid: 0, random: 3, seed: 5 }), ..Default::default() };
        let rep = run_scenario(&doc, &opts).unwrap();
        prop_assert!(rep.passed(), "{}", rep.to_text());
    }
}
