use nalgebra::DMatrix;
use proptest::prelude::*;

use statgeom::geometry::{
    constant_curvature_fit, AmbientJets, ConnectionKind,
};
use statgeom::checks::ambient::curvature_duality_with;
use statgeom::linalg::{from_dmatrix, identity, matmul, to_dmatrix};
use statgeom::oracle::fd_gradient;
use statgeom::product::{derive_f_star_at, model_curvature_eq_o, projectors_at};
use statgeom::scenario::synthetic::random_statistical;
use statgeom::{bundled_file, bundled_scenario, load_scenario, run_scenario, Arr, RunOptions, SamplePlan, Verdict};

const ROUND_SPHERE: &str = r#"{
  "name": "round-sphere",
  "manifold": {
    "dim": 2,
    "coords": ["t", "p"],
    "box": [[0.5, 2.5], [-1, 1]],
    "metric": [["1", "0"], ["0", "sin(t)^2"]]
  }
}"#;

#[test]
fn round_sphere_has_unit_curvature() {
    let doc = load_scenario(ROUND_SPHERE).unwrap();
    let fit = constant_curvature_fit(&doc.geom, &doc.plan, ConnectionKind::LeviCivita).unwrap();
    assert!((fit.c.unwrap() - 1.0).abs() < 1e-10, "{fit:?}");
    assert!(fit.residual < 1e-10);
}

/// Γ^k_ij = ½ g^{kl}(∂i g_lj + ∂j g_il − ∂l g_ij) with ∂g by central differences.
#[test]
fn levi_civita_matches_finite_difference_christoffels() {
    let doc = random_statistical(7, 3);
    let n = 3;
    for p in doc.points() {
        let aj = AmbientJets::at(&doc.geom, &p).unwrap();
        let gamma = aj.connection(ConnectionKind::LeviCivita).gamma;
        let ginv = aj.metric_inverse();
        let dg: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| fd_gradient(|q| doc.geom.metric[[i, j]].eval_value(q).unwrap(), &p, 1e-5))
                    .collect()
            })
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let want: f64 = (0..n)
                        .map(|l| 0.5 * ginv[[k, l]] * (dg[l][j][i] + dg[i][l][j] - dg[i][j][l]))
                        .sum();
                    assert!((gamma[[k, i, j]] - want).abs() < 1e-7, "{k}{i}{j}: {} vs {want}", gamma[[k, i, j]]);
                }
            }
        }
    }
}

#[test]
fn conjugate_structure_at_origin() {
    let doc = bundled_scenario("E1").unwrap();
    let aj = AmbientJets::at(&doc.geom, &[0.0; 4]).unwrap();
    let fs = aj.conjugate_values().unwrap();
    let want = Arr::from_fn(&[4, 4], |i| match (i[0], i[1]) {
        (0, 2) => 0.5,
        (1, 3) | (3, 1) => 1.0,
        (2, 0) => 2.0,
        _ => 0.0,
    });
    assert!(fs.max_abs_diff(&want) < 1e-14, "{fs:?}");
}

#[test]
fn projectors_of_plus_and_minus_identity() {
    let id = identity(3);
    let p = projectors_at(&id).unwrap();
    assert!(p.p.max_abs_diff(&id) == 0.0 && p.q.max_abs() == 0.0);
    let minus = Arr::from_fn(&[3, 3], |i| -id.get(i));
    let q = projectors_at(&minus).unwrap();
    assert!(q.q.max_abs_diff(&id) == 0.0 && q.p.max_abs() == 0.0);
    assert!(projectors_at(&Arr::from_fn(&[3, 3], |i| 2.0 * id.get(i))).is_err());
}

#[test]
fn model_curvature_is_skew_and_satisfies_bianchi() {
    let g = from_dmatrix(&DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 1.5]));
    let f = Arr::from_fn(&[3, 3], |i| if i[0] == i[1] { if i[0] == 2 { -1.0 } else { 1.0 } } else { 0.0 });
    let r = model_curvature_eq_o(&g, &f, 0.7);
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((r[[l, i, j, k]] + r[[l, j, i, k]]).abs() < 1e-14);
                    let b = r[[l, i, j, k]] + r[[l, j, k, i]] + r[[l, k, i, j]];
                    assert!(b.abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn curvature_duality_needs_the_dual_curvature() {
    let doc = bundled_scenario("E2").unwrap();
    let aj = AmbientJets::at(&doc.geom, &[0.1, -0.2, 0.3, 0.05]).unwrap();
    assert!(curvature_duality_with(&aj, ConnectionKind::Primal, ConnectionKind::Dual) < 1e-10);
    assert!(curvature_duality_with(&aj, ConnectionKind::Primal, ConnectionKind::Primal) > 1e-3);
}

#[test]
fn perturbed_structure_is_not_parallel() {
    let only = |c: &str| RunOptions { checks: Some(vec![c.to_string()]), ..Default::default() };
    let doc = bundled_scenario("E2").unwrap();
    assert_eq!(run_scenario(&doc, &only("nabla_F")).unwrap().checks[0].verdict, Verdict::Pass);
    let mut file = bundled_file("E2").unwrap();
    file.structure.as_mut().unwrap().f[0][2] = "1+0.01*x2".into();
    let doc = statgeom::scenario::compile(&file).unwrap();
    let rep = run_scenario(&doc, &only("nabla_F")).unwrap();
    assert_eq!(rep.checks[0].verdict, Verdict::Fail);
    assert!(rep.checks[0].max_residual > 1e-3);
}

#[test]
fn random_statistical_manifolds_are_consistent() {
    for seed in 0..5 {
        let doc = random_statistical(seed, 3);
        let rep = run_scenario(&doc, &RunOptions::default()).unwrap();
        let inv = rep.check("dual_involution").unwrap();
        assert!(inv.max_residual <= 1e-10, "seed {seed}: {}", inv.max_residual);
        assert!(rep.passed(), "{}", rep.to_text());
    }
}

#[test]
fn sample_plan_is_reproducible() {
    let b = [(-1.0, 1.0), (0.0, 2.0), (3.0, 4.0)];
    let plan = SamplePlan { grid: 2, random: 5, seed: 9 };
    assert_eq!(plan.points(&b), plan.points(&b));
    let other = SamplePlan { seed: 10, ..plan };
    assert_ne!(plan.points(&b)[8..], other.points(&b)[8..]);
}

fn spd(seed: &[f64]) -> DMatrix<f64> {
    let a = DMatrix::from_row_slice(3, 3, seed);
    &a * a.transpose() + DMatrix::identity(3, 3)
}

fn involution(p: &[f64], signs: [bool; 3]) -> Option<DMatrix<f64>> {
    let p = DMatrix::from_row_slice(3, 3, p) + DMatrix::identity(3, 3) * 3.0;
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(3, signs.iter().map(|&s| if s { 1.0 } else { -1.0 })));
    let inv = p.clone().try_inverse()?;
    Some(&p * d * inv)
}

proptest! {
    #[test]
    fn conjugation_is_an_involution(
        a in prop::collection::vec(-1.0f64..1.0, 9),
        p in prop::collection::vec(-1.0f64..1.0, 9),
        signs in any::<[bool; 3]>(),
    ) {
        let g = from_dmatrix(&spd(&a));
        let Some(f) = involution(&p, signs) else { return Ok(()); };
        let f = from_dmatrix(&f);
        let fs = derive_f_star_at(&g, &f).unwrap();
        let fss = derive_f_star_at(&g, &fs).unwrap();
        prop_assert!(fss.max_abs_diff(&f) < 1e-9);
        prop_assert!(matmul(&fs, &fs).max_abs_diff(&identity(3)) < 1e-9);
        // g(FX, Y) = g(X, F*Y)
        let lhs = to_dmatrix(&f).transpose() * to_dmatrix(&g);
        let rhs = to_dmatrix(&g) * to_dmatrix(&fs);
        prop_assert!((lhs - rhs).abs().max() < 1e-9);
    }
}
