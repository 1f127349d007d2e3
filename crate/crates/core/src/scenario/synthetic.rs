//! Constructed scenarios that exercise branches the worked examples do not
//! reach, plus a seeded generator of random statistical manifolds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::parse_expr;
use crate::geometry::{ChartGeometry, Connection, SamplePlan};
use crate::tensor::Arr;

use super::bundled::{names, strings};
use super::{
    ConnectionFile, ImmersionFile, ManifoldFile, ModelFile, SampleFile, ScenarioDoc, ScenarioFile, StructureFile,
    TolerancesFile, DEFAULT_TOLERANCE,
};

pub const IDS: [&str; 7] = [
    "S2xS2",
    "S2xS2-slice",
    "S2xS2-diagonal",
    "S2xS2-tangential",
    "sphere",
    "flat-tangential",
    "tk-model",
];

fn base(name: &str, manifold: ManifoldFile) -> ScenarioFile {
    ScenarioFile {
        name: name.into(),
        manifold,
        connection: None,
        structure: None,
        immersion: None,
        model: None,
        checks: Vec::new(),
        tolerances: TolerancesFile::default(),
        sample: SampleFile::default(),
        assertions: Vec::new(),
    }
}

/// Product of two unit spheres with F = +1 on the first factor and −1 on
/// the second. Its Levi-Civita connection satisfies the product-curvature
/// model with c = 1/2.
fn s2xs2() -> ScenarioFile {
    let mut f = base(
        "S2xS2",
        ManifoldFile {
            dim: 4,
            coords: names(&["t1", "p1", "t2", "p2"]),
            bbox: vec![[0.5, 2.5], [-1.0, 1.0], [0.5, 2.5], [-1.0, 1.0]],
            metric: strings(&[
                &["1", "0", "0", "0"],
                &["0", "sin(t1)^2", "0", "0"],
                &["0", "0", "1", "0"],
                &["0", "0", "0", "sin(t2)^2"],
            ]),
        },
    );
    f.structure = Some(StructureFile {
        f: strings(&[&["1", "0", "0", "0"], &["0", "1", "0", "0"], &["0", "0", "-1", "0"], &["0", "0", "0", "-1"]]),
        expected_f_star: None,
    });
    f.model = Some(ModelFile { c: 0.5 });
    f.checks = names(&[
        "statistical",
        "dual_involution",
        "almost_product_like",
        "nabla_F",
        "eq_o",
        "lemma3",
    ]);
    f
}

fn s2xs2_sub(name: &str, dim: usize, coords: &[&str], bbox: Vec<[f64; 2]>, map: &[&str], checks: &[&str]) -> ScenarioFile {
    let mut f = s2xs2();
    f.name = name.into();
    f.immersion = Some(ImmersionFile {
        dim,
        coords: names(coords),
        bbox,
        map: names(map),
        normals: None,
    });
    f.checks = names(checks);
    f
}

fn flat_r3(name: &str) -> ScenarioFile {
    base(
        name,
        ManifoldFile {
            dim: 3,
            coords: names(&["x", "y", "z"]),
            bbox: vec![[-3.0, 3.0]; 3],
            metric: strings(&[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]]),
        },
    )
}

/// Round sphere of radius 2 in flat space with the trivial structure F = I.
fn sphere() -> ScenarioFile {
    let mut f = flat_r3("sphere");
    f.structure = Some(StructureFile {
        f: strings(&[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]]),
        expected_f_star: None,
    });
    f.model = Some(ModelFile { c: 0.0 });
    f.immersion = Some(ImmersionFile {
        dim: 2,
        coords: names(&["th", "ph"]),
        bbox: vec![[0.5, 2.5], [-1.0, 1.0]],
        map: names(&["2*sin(th)*cos(ph)", "2*sin(th)*sin(ph)", "2*cos(th)"]),
        normals: None,
    });
    f.checks = names(&[
        "frames",
        "lemma4",
        "gauss_codazzi_ricci",
        "totally_umbilical",
        "eq_o_submanifold",
    ]);
    f
}

/// The cone z = √(x²+y²) in flat space with F = diag(1, 1, −1): every normal
/// is F-orthogonal to itself, so the surface is tangential and not totally
/// geodesic.
fn flat_tangential() -> ScenarioFile {
    let mut f = flat_r3("flat-tangential");
    f.structure = Some(StructureFile {
        f: strings(&[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "-1"]]),
        expected_f_star: None,
    });
    f.model = Some(ModelFile { c: 0.0 });
    f.immersion = Some(ImmersionFile {
        dim: 2,
        coords: names(&["u", "v"]),
        bbox: vec![[0.5, 1.5], [-0.5, 0.5]],
        map: names(&["u", "v", "sqrt(u^2+v^2)"]),
        normals: None,
    });
    f.checks = names(&[
        "xi_mu",
        "tangential",
        "phi_eta",
        "kappa",
        "prop5a",
        "prop8a",
        "curvature_xi",
        "tk_identities",
        "para_contact_like",
    ]);
    f
}

/// A 2-dimensional statistical manifold whose curvature is exactly the
/// product-curvature model with c = 1/4, with a totally geodesic tangential
/// line. F is not parallel here.
fn tk_model() -> ScenarioFile {
    let mut f = base(
        "tk-model",
        ManifoldFile {
            dim: 2,
            coords: names(&["x", "y"]),
            bbox: vec![[-1.0, 1.0], [0.5, 2.0]],
            metric: strings(&[&["1", "0"], &["0", "1"]]),
        },
    );
    let a = "-1/sinh(y)";
    f.connection = Some(ConnectionFile {
        gamma: vec![
            vec![names(&["0", a]), names(&[a, "0"])],
            vec![names(&[a, "0"]), names(&["0", "0"])],
        ],
    });
    f.structure = Some(StructureFile {
        f: strings(&[
            &["0", "-(1/sinh(y)+cosh(y)/sinh(y))"],
            &["1/sinh(y)-cosh(y)/sinh(y)", "0"],
        ]),
        expected_f_star: None,
    });
    f.model = Some(ModelFile { c: 0.25 });
    f.immersion = Some(ImmersionFile {
        dim: 1,
        coords: names(&["v"]),
        bbox: vec![[0.5, 2.0]],
        map: names(&["0", "v"]),
        normals: None,
    });
    f.checks = names(&["statistical", "eq_o", "xi_mu", "tangential", "tk_identities"]);
    f
}

pub fn synthetic_file(id: &str) -> Option<ScenarioFile> {
    let b2 = || vec![[0.5, 2.5], [-1.0, 1.0]];
    let sub_checks = ["frames", "lemma4", "invariance", "totally_geodesic", "eq_o_submanifold"];
    Some(match id {
        "S2xS2" => s2xs2(),
        "S2xS2-slice" => s2xs2_sub("S2xS2-slice", 2, &["t", "p"], b2(), &["t", "p", "1", "0"], &sub_checks),
        "S2xS2-diagonal" => s2xs2_sub("S2xS2-diagonal", 2, &["t", "p"], b2(), &["t", "p", "t", "p"], &sub_checks),
        "S2xS2-tangential" => s2xs2_sub(
            "S2xS2-tangential",
            3,
            &["t", "p", "q"],
            vec![[0.5, 2.5], [-1.0, 1.0], [-1.0, 1.0]],
            &["t", "p", "t", "q"],
            &[
                "xi_mu",
                "tangential",
                "phi_eta",
                "kappa",
                "prop5a",
                "prop8a",
                "curvature_xi",
                "tk_identities",
                "para_contact_like",
            ],
        ),
        "sphere" => sphere(),
        "flat-tangential" => flat_tangential(),
        "tk-model" => tk_model(),
        _ => return None,
    })
}

/// A random statistical manifold: an analytic diagonally dominant metric and
/// the Levi-Civita connection plus g⁻¹C for a random totally symmetric C.
pub fn random_statistical(seed: u64, dim: usize) -> ScenarioDoc {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    let lin = |rng: &mut ChaCha8Rng| -> String {
        let terms: Vec<String> = coords
            .iter()
            .map(|c| format!("{:.3}*{c}", rng.random_range(-1.0..1.0)))
            .collect();
        terms.join("+")
    };
    let mut metric = Arr::from_fn(&[dim, dim], |_| String::new());
    for i in 0..dim {
        for j in i..dim {
            let s = if i == j {
                format!("{:.3}+{:.3}*sin({})", rng.random_range(1.5..2.5), rng.random_range(0.1..0.4), lin(&mut rng))
            } else {
                format!("{:.3}*cos({})", rng.random_range(-0.2..0.2), lin(&mut rng))
            };
            metric[[i, j]] = s.clone();
            metric[[j, i]] = s;
        }
    }
    // Totally symmetric cubic form: one entry per sorted index triple.
    let mut cubic = Arr::from_fn(&[dim, dim, dim], |_| String::new());
    for i in 0..dim {
        for j in i..dim {
            for k in j..dim {
                let s = format!("{:.3}*exp({:.3}*{})", rng.random_range(-0.5..0.5), rng.random_range(-0.3..0.3), lin(&mut rng));
                for p in [[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
                    cubic[p] = s.clone();
                }
            }
        }
    }
    let parse = |s: &String| parse_expr(s, &coords).expect("generated expressions parse");
    let geom = ChartGeometry {
        coords: coords.clone(),
        bounds: vec![(-1.0, 1.0); dim],
        metric: metric.map(parse),
        connection: Connection::LeviCivitaWithCubic(cubic.map(parse)),
        structure: None,
    };
    ScenarioDoc {
        name: format!("random-statistical-{seed}"),
        geom,
        expected_f_star: None,
        immersion: None,
        model_c: None,
        checks: names(&["statistical", "dual_involution", "mean_connection_metric", "curvature_duality"]),
        tolerance: DEFAULT_TOLERANCE,
        overrides: Default::default(),
        plan: SamplePlan { grid: 0, random: 5, seed },
        assertions: Vec::new(),
        file: None,
    }
}
