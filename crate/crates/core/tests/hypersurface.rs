use statgeom::geometry::ConnectionKind;
use statgeom::hypersurface::{kappa_at, xi_mu_at, HypersurfaceAt};
use statgeom::scenario::assertions::PointData;
use statgeom::{bundled_scenario, load_scenario, run_scenario, RunOptions, ScenarioDoc, Verdict};

fn hs(doc: &ScenarioDoc, u: &[f64]) -> HypersurfaceAt {
    HypersurfaceAt::compute(&doc.geom, doc.immersion.as_ref().unwrap(), u).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

const POINTS: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [0.3, -0.5, 0.7], [-0.8, 0.2, -0.1], [0.9, 0.9, -0.9]];

#[test]
fn structure_vector_at_origin() {
    let doc = bundled_scenario("E6").unwrap();
    let xd = xi_mu_at(&doc.geom, doc.immersion.as_ref().unwrap(), &[0.0; 3]).unwrap();
    assert!(xd.mu.abs() < 1e-14 && xd.mu_star.abs() < 1e-14);
    assert!(max_diff(&xd.xi, &[0.0, 1.0, 0.0]) < 1e-14);
}

#[test]
fn kappa_and_shape_operator_at_origin() {
    let doc = bundled_scenario("E7").unwrap();
    let h = hs(&doc, &[0.0; 3]);
    let k = h.kappa();
    assert!(max_diff(&k.kappa, &[-1.5, 1.0, -1.5]) < 1e-12, "{:?}", k.kappa);
    assert!(max_diff(&h.a_n(&[1.0, 0.0, 0.0]), &[0.0, 2.0, 0.0]) < 1e-12);
}

/// ξ = e^{-(x1-x3)/2}∂2 does not depend on x2, so ∇̃_{∂2}ξ = e^{-(x1-x3)/2} Γ̃^i_22 ∂i
/// and ∇_{∂2}ξ is its tangential part.
#[test]
fn nabla_xi_along_the_fibre_from_ambient_christoffels() {
    let doc = bundled_scenario("E7").unwrap();
    for u in POINTS {
        let pd = PointData::compute(&doc.geom, doc.immersion.as_ref(), &u).unwrap();
        let gamma = pd.ambient.connection(ConnectionKind::Primal).gamma;
        let hm = (-(u[0] - u[2]) / 2.0).exp();
        let w: Vec<f64> = (0..4).map(|i| hm * gamma[[i, 1, 1]]).collect();
        let h = HypersurfaceAt::new(pd.ig.clone().unwrap()).unwrap();
        let (tangential, _) = h.ig.values.split(&w);
        let got = h.nabla_xi(&[0.0, 1.0, 0.0]);
        assert!(max_diff(&got, &tangential) < 1e-12, "{u:?}");

        let hp = ((u[0] - u[2]) / 2.0).exp();
        let corrected = [-hp, hm, -hp];
        assert!(max_diff(&got, &corrected) < 1e-12);
        // The variant with ∂2 + ∂3 in place of ∂1 + ∂3 is off by e^{(x1-x3)/2} in two slots.
        let variant = [0.0, hm - hp, -hp];
        assert!(max_diff(&got, &variant) > 0.1);
    }
}

#[test]
fn kappa_on_the_third_axis_equals_the_first() {
    let doc = bundled_scenario("E7").unwrap();
    for u in POINTS {
        let k = hs(&doc, &u).kappa();
        let k1 = -(1.0 + 2.0 * (-u[0] + u[2]).exp()) / 2.0;
        assert!((k.kappa[0] - k1).abs() < 1e-12 && (k.kappa[2] - k1).abs() < 1e-12);
        assert!((k.kappa[1] - 1.0).abs() < 1e-12);
    }
}

/// x4 = 0 in flat space with F = diag(1, 1, 1, −1): FN = −N.
const FLAT_SLICE: &str = r#"{
  "name": "flat-slice",
  "manifold": {
    "dim": 4,
    "coords": ["x1", "x2", "x3", "x4"],
    "box": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]],
    "metric": [["1","0","0","0"], ["0","1","0","0"], ["0","0","1","0"], ["0","0","0","1"]]
  },
  "structure": { "F": [["1","0","0","0"], ["0","1","0","0"], ["0","0","1","0"], ["0","0","0","-1"]] },
  "immersion": {
    "dim": 3,
    "coords": ["u1", "u2", "u3"],
    "box": [[-1, 1], [-1, 1], [-1, 1]],
    "map": ["u1", "u2", "u3", "0"]
  },
  "checks": ["xi_mu", "tangential", "kappa", "phi_eta", "prop5a", "para_contact_like"]
}"#;

#[test]
fn non_tangential_hypersurface_is_reported() {
    let doc = load_scenario(FLAT_SLICE).unwrap();
    let xd = xi_mu_at(&doc.geom, doc.immersion.as_ref().unwrap(), &[0.1, 0.2, 0.3]).unwrap();
    assert!((xd.mu + 1.0).abs() < 1e-14);
    assert!(xd.xi.iter().all(|v| v.abs() < 1e-14));
    let rep = run_scenario(&doc, &RunOptions::default()).unwrap();
    assert_eq!(rep.check("xi_mu").unwrap().verdict, Verdict::Pass);
    assert_eq!(rep.check("tangential").unwrap().verdict, Verdict::Fail);
    assert_eq!(rep.check("kappa").unwrap().verdict, Verdict::Pass);
    for name in ["phi_eta", "prop5a", "para_contact_like"] {
        let c = rep.check(name).unwrap();
        assert_eq!(c.verdict, Verdict::Skipped, "{name}");
        assert!(c.reason.as_deref().unwrap().contains("not tangential"), "{name}");
    }
    assert!(!rep.passed());
}

#[test]
fn metric_connection_has_no_normal_one_form() {
    let doc = bundled_scenario("sphere").unwrap();
    let imm = doc.immersion.as_ref().unwrap();
    for u in [[1.0, 0.2], [0.7, -0.6], [2.1, 0.9]] {
        let k = kappa_at(&doc.geom, imm, &u).unwrap();
        assert!(k.kappa.iter().chain(&k.kappa_star).all(|v| v.abs() < 1e-12), "{k:?}");
    }
}

#[test]
fn hypersurface_data_requires_codimension_one() {
    let doc = bundled_scenario("E4").unwrap();
    let err = HypersurfaceAt::compute(&doc.geom, doc.immersion.as_ref().unwrap(), &[0.0, 0.0]).unwrap_err();
    assert!(matches!(err, statgeom::Error::Codimension { codim: 2, .. }), "{err:?}");
}
