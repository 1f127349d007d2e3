//! The seven worked examples as scenario documents.
//!
//! Each builder returns the on-disk document. Where a hand-listed value
//! disagrees with the computation, the computed form is asserted.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{
    compile, AssertionFile, ConnectionFile, ImmersionFile, ManifoldFile, SampleFile, ScenarioDoc, ScenarioFile,
    StructureFile, TolerancesFile,
};

pub const IDS: [&str; 7] = ["E1", "E2", "E3", "E4", "E5", "E6", "E7"];

// e^{-x1+x3}, e^{x1-x3} and the half powers.
const EM: &str = "exp(-x1+x3)";
const EP: &str = "exp(x1-x3)";
const HP: &str = "exp((x1-x3)/2)";
const HM: &str = "exp(-(x1-x3)/2)";

pub(crate) fn strings(rows: &[&[&str]]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
}

pub(crate) fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub(crate) fn assertion(target: &str, expr: &str) -> AssertionFile {
    AssertionFile {
        name: target.to_string(),
        target: target.to_string(),
        expr: expr.to_string(),
        tolerance: None,
    }
}

/// One assertion per component of a vector-valued target; components not
/// listed are asserted to vanish.
pub(crate) fn vector(out: &mut Vec<AssertionFile>, target: &str, comps: &[&str], values: &[(&str, &str)]) {
    for c in comps {
        let e = values.iter().find(|(k, _)| k == c).map(|(_, v)| *v).unwrap_or("0");
        out.push(assertion(&format!("{target}.{c}"), e));
    }
}

/// Γ^k_ij from `∇_{∂i}∂j = Σ v_k ∂k` lines, 1-based.
pub(crate) fn christoffel(n: usize, lines: &[(&[(usize, usize)], &[(usize, &str)])]) -> Vec<Vec<Vec<String>>> {
    let mut g = vec![vec![vec!["0".to_string(); n]; n]; n];
    for (pairs, vals) in lines {
        for &(i, j) in pairs.iter() {
            for &(k, v) in vals.iter() {
                g[k - 1][i - 1][j - 1] = v.to_string();
            }
        }
    }
    g
}

fn coords4() -> Vec<String> {
    names(&["x1", "x2", "x3", "x4"])
}

fn unit_box(n: usize) -> Vec<[f64; 2]> {
    vec![[-1.0, 1.0]; n]
}

fn tolerances(default: f64) -> TolerancesFile {
    TolerancesFile {
        default,
        overrides: BTreeMap::new(),
    }
}

fn e1() -> ScenarioFile {
    let one_em = format!("1+{EM}");
    let inv = format!("1/(1+{EP})");
    let one_ep = format!("1+{EP}");
    ScenarioFile {
        name: "E1".into(),
        manifold: ManifoldFile {
            dim: 4,
            coords: coords4(),
            bbox: unit_box(4),
            metric: strings(&[
                &[&one_em, "0", "0", "0"],
                &["0", EP, "0", "0"],
                &["0", "0", EM, "0"],
                &["0", "0", "0", EP],
            ]),
        },
        connection: None,
        structure: Some(StructureFile {
            f: strings(&[&["0", "0", "1", "0"], &["0", "0", "0", "1"], &["1", "0", "0", "0"], &["0", "1", "0", "0"]]),
            expected_f_star: Some(strings(&[
                &["0", "0", &inv, "0"],
                &["0", "0", "0", "1"],
                &[&one_ep, "0", "0", "0"],
                &["0", "1", "0", "0"],
            ])),
        }),
        immersion: None,
        model: None,
        checks: names(&["almost_product_like", "structure_pairing", "projectors", "expected_F_star"]),
        tolerances: tolerances(1e-9),
        sample: SampleFile::default(),
        assertions: Vec::new(),
    }
}

fn e2_connection() -> Vec<Vec<Vec<String>>> {
    let a = format!("-{EM}");
    let b = format!("-(1+{EM})");
    let c = format!("-{EP}");
    christoffel(
        4,
        &[
            (&[(1, 1), (1, 3), (3, 1), (3, 3)], &[(1, EM), (3, EM)]),
            (&[(1, 2), (2, 1), (3, 4), (4, 3)], &[(2, &a), (4, &b)]),
            (&[(1, 4), (4, 1), (2, 3), (3, 2)], &[(2, &b), (4, &a)]),
            (&[(2, 2), (4, 4)], &[(1, &c), (2, "1"), (3, &c), (4, "-1")]),
            (&[(2, 4), (4, 2)], &[(1, &c), (2, "-1"), (3, &c), (4, "1")]),
        ],
    )
}

/// The dual-connection list, one assertion per coefficient.
fn e2_dual_assertions() -> Vec<AssertionFile> {
    let c = ["x1", "x2", "x3", "x4"];
    let n11 = format!("-{EM}*(2+{EM})/(1+{EM})");
    let m1 = format!("-(1+{EM})");
    let p1 = format!("1+{EM}");
    let q = format!("-exp(-2*(x1-x3))/(1+{EM})");
    let r1 = format!("1/(1+{EM})");
    let r3 = format!("(1+{EM})/exp(-2*(x1-x3))");
    let s3 = format!("1-{EM}");
    let lines: Vec<(Vec<(usize, usize)>, Vec<(&str, &str)>)> = vec![
        (vec![(1, 1)], vec![("x1", &n11), ("x3", &m1)]),
        (vec![(1, 2), (2, 1), (1, 4), (4, 1)], vec![("x2", &p1), ("x4", &p1)]),
        (vec![(1, 3), (3, 1)], vec![("x1", &q), ("x3", &m1)]),
        (vec![(2, 2), (4, 4)], vec![("x1", &r1), ("x2", "-1"), ("x3", &r3), ("x4", "1")]),
        (vec![(2, 3), (3, 2), (3, 4), (4, 3)], vec![("x2", EM), ("x4", EM)]),
        (vec![(2, 4), (4, 2)], vec![("x1", EP), ("x2", "1"), ("x3", EP), ("x4", "-1")]),
        (vec![(3, 3)], vec![("x1", &q), ("x3", &s3)]),
    ];
    let mut out = Vec::new();
    for (pairs, vals) in &lines {
        for &(i, j) in pairs {
            vector(&mut out, &format!("ambient.nabla_star[x{i},x{j}]"), &c, vals);
        }
    }
    out
}

fn e2() -> ScenarioFile {
    let mut f = e1();
    f.name = "E2".into();
    f.connection = Some(ConnectionFile { gamma: e2_connection() });
    f.checks = names(&[
        "statistical",
        "dual_involution",
        "mean_connection_metric",
        "curvature_duality",
        "bianchi",
        "almost_product_like",
        "structure_pairing",
        "nabla_F",
        "lemma3",
        "expected_F_star",
    ]);
    f.assertions = e2_dual_assertions();
    f
}

fn e3() -> ScenarioFile {
    let mut f = e2();
    f.name = "E3".into();
    f.immersion = Some(ImmersionFile {
        dim: 2,
        coords: names(&["x1", "x3"]),
        bbox: unit_box(2),
        map: names(&["x1", "0", "x3", "0"]),
        normals: None,
    });
    f.checks = names(&["frames", "lemma4", "induced_duality", "fhts", "invariance"]);
    let t = ["x1", "x3"];
    let nn = ["n:x2", "n:x4"];
    let mut a = vec![
        assertion("metric[x1,x1]", &format!("1+{EM}")),
        assertion("metric[x1,x3]", "0"),
        assertion("metric[x3,x3]", EM),
    ];
    vector(&mut a, "f[x1]", &t, &[("x3", "1")]);
    vector(&mut a, "f[x3]", &t, &[("x1", "1")]);
    for b in t {
        vector(&mut a, &format!("h[{b}]"), &nn, &[]);
        vector(&mut a, &format!("h_star[{b}]"), &nn, &[]);
    }
    for v in nn {
        vector(&mut a, &format!("t[{v}]"), &t, &[]);
        vector(&mut a, &format!("t_star[{v}]"), &t, &[]);
    }
    vector(&mut a, "s[n:x2]", &nn, &[("n:x4", "1")]);
    vector(&mut a, "s[n:x4]", &nn, &[("n:x2", "1")]);
    vector(&mut a, "s_star[n:x2]", &nn, &[("n:x4", "1")]);
    vector(&mut a, "s_star[n:x4]", &nn, &[("n:x2", "1")]);
    let p = format!("1+{EP}");
    let q = format!("1/(1+{EP})");
    vector(&mut a, "f_star[x1]", &t, &[("x3", &p)]);
    vector(&mut a, "f_star[x3]", &t, &[("x1", &q)]);
    f.assertions = a;
    f
}

fn e4() -> ScenarioFile {
    let mut f = e3();
    f.name = "E4".into();
    f.checks = names(&[
        "frames",
        "lemma4",
        "induced_duality",
        "fhts",
        "invariance",
        "lemma6",
        "lemma7",
        "gauss_codazzi_ricci",
        "structure_curvature",
        "totally_geodesic",
    ]);
    let t = ["x1", "x3"];
    let nn = ["n:x2", "n:x4"];
    let mut a = Vec::new();
    for i in t {
        for j in t {
            vector(&mut a, &format!("nabla[{i},{j}]"), &t, &[("x1", EM), ("x3", EM)]);
            vector(&mut a, &format!("sigma[{i},{j}]"), &nn, &[]);
            vector(&mut a, &format!("sigma_star[{i},{j}]"), &nn, &[]);
        }
    }
    for v in nn {
        for x in t {
            vector(&mut a, &format!("A[{v},{x}]"), &t, &[]);
            vector(&mut a, &format!("A_star[{v},{x}]"), &t, &[]);
        }
    }
    let m = format!("-{EM}");
    let mp = format!("-(1+{EM})");
    let p = format!("1+{EM}");
    vector(&mut a, "D[x1,n:x2]", &nn, &[("n:x2", &m), ("n:x4", &mp)]);
    vector(&mut a, "D[x3,n:x4]", &nn, &[("n:x2", &m), ("n:x4", &mp)]);
    vector(&mut a, "D[x1,n:x4]", &nn, &[("n:x2", &mp), ("n:x4", &m)]);
    vector(&mut a, "D[x3,n:x2]", &nn, &[("n:x2", &mp), ("n:x4", &m)]);
    let n11 = format!("-{EM}*(2+{EM})/(1+{EM})");
    let q = format!("-exp(-2*(x1-x3))/(1+{EM})");
    let s3 = format!("1-{EM}");
    vector(&mut a, "nabla_star[x1,x1]", &t, &[("x1", &n11), ("x3", &mp)]);
    vector(&mut a, "nabla_star[x1,x3]", &t, &[("x1", &q), ("x3", &mp)]);
    vector(&mut a, "nabla_star[x3,x1]", &t, &[("x1", &q), ("x3", &mp)]);
    vector(&mut a, "nabla_star[x3,x3]", &t, &[("x1", &q), ("x3", &s3)]);
    vector(&mut a, "D_star[x1,n:x2]", &nn, &[("n:x2", &p), ("n:x4", &p)]);
    vector(&mut a, "D_star[x1,n:x4]", &nn, &[("n:x2", &p), ("n:x4", &p)]);
    vector(&mut a, "D_star[x3,n:x2]", &nn, &[("n:x2", EM), ("n:x4", EM)]);
    vector(&mut a, "D_star[x3,n:x4]", &nn, &[("n:x2", EM), ("n:x4", EM)]);
    f.assertions = a;
    f
}

fn e5() -> ScenarioFile {
    let mut f = e2();
    f.name = "E5".into();
    f.immersion = Some(ImmersionFile {
        dim: 3,
        coords: names(&["x1", "x2", "x3"]),
        bbox: unit_box(3),
        map: names(&["x1", "x2", "x3", "0"]),
        normals: None,
    });
    f.checks = names(&[
        "frames",
        "lemma4",
        "induced_duality",
        "fhts",
        "lemma7",
        "gauss_codazzi_ricci",
        "structure_curvature",
    ]);
    let t = ["x1", "x2", "x3"];
    let nn = ["n:x4"];
    let m = format!("-{EM}");
    let mp = format!("-(1+{EM})");
    let p = format!("1+{EM}");
    let mep = format!("-{EP}");
    let mut a = vec![
        assertion("metric[x1,x1]", &format!("1+{EM}")),
        assertion("metric[x2,x2]", EP),
        assertion("metric[x3,x3]", EM),
    ];
    for (i, j) in [("x1", "x1"), ("x1", "x3"), ("x3", "x1"), ("x3", "x3")] {
        vector(&mut a, &format!("nabla[{i},{j}]"), &t, &[("x1", EM), ("x3", EM)]);
        vector(&mut a, &format!("sigma[{i},{j}]"), &nn, &[]);
    }
    vector(&mut a, "nabla[x1,x2]", &t, &[("x2", &m)]);
    vector(&mut a, "nabla[x2,x1]", &t, &[("x2", &m)]);
    vector(&mut a, "sigma[x1,x2]", &nn, &[("n:x4", &mp)]);
    vector(&mut a, "nabla[x2,x2]", &t, &[("x1", &mep), ("x2", "1"), ("x3", &mep)]);
    vector(&mut a, "sigma[x2,x2]", &nn, &[("n:x4", "-1")]);
    vector(&mut a, "nabla[x2,x3]", &t, &[("x2", &mp)]);
    vector(&mut a, "nabla[x3,x2]", &t, &[("x2", &mp)]);
    vector(&mut a, "sigma[x2,x3]", &nn, &[("n:x4", &m)]);
    vector(&mut a, "A[n:x4,x1]", &t, &[("x2", &p)]);
    vector(&mut a, "A[n:x4,x2]", &t, &[("x1", EP), ("x2", "1"), ("x3", EP)]);
    vector(&mut a, "A[n:x4,x3]", &t, &[("x2", EM)]);
    // The Weingarten split and the dual normal connection both give −e^{-x1+x3}.
    vector(&mut a, "D[x1,n:x4]", &nn, &[("n:x4", &m)]);
    vector(&mut a, "D[x2,n:x4]", &nn, &[("n:x4", "1")]);
    vector(&mut a, "D[x3,n:x4]", &nn, &[("n:x4", &mp)]);

    let n11 = format!("-{EM}*(2+{EM})/(1+{EM})");
    let q = format!("-exp(-2*(x1-x3))/(1+{EM})");
    let r1 = format!("1/(1+{EM})");
    let r3 = format!("(1+{EM})/exp(-2*(x1-x3))");
    let s3 = format!("1-{EM}");
    vector(&mut a, "nabla_star[x1,x1]", &t, &[("x1", &n11), ("x3", &mp)]);
    vector(&mut a, "sigma_star[x1,x1]", &nn, &[]);
    vector(&mut a, "nabla_star[x1,x2]", &t, &[("x2", &p)]);
    vector(&mut a, "nabla_star[x2,x1]", &t, &[("x2", &p)]);
    vector(&mut a, "sigma_star[x1,x2]", &nn, &[("n:x4", &p)]);
    vector(&mut a, "nabla_star[x1,x3]", &t, &[("x1", &q), ("x3", &mp)]);
    vector(&mut a, "nabla_star[x3,x1]", &t, &[("x1", &q), ("x3", &mp)]);
    vector(&mut a, "sigma_star[x1,x3]", &nn, &[]);
    vector(&mut a, "nabla_star[x2,x2]", &t, &[("x1", &r1), ("x2", "-1"), ("x3", &r3)]);
    vector(&mut a, "sigma_star[x2,x2]", &nn, &[("n:x4", "1")]);
    vector(&mut a, "nabla_star[x2,x3]", &t, &[("x2", EM)]);
    vector(&mut a, "nabla_star[x3,x2]", &t, &[("x2", EM)]);
    vector(&mut a, "sigma_star[x2,x3]", &nn, &[("n:x4", EM)]);
    vector(&mut a, "nabla_star[x3,x3]", &t, &[("x1", &q), ("x3", &s3)]);
    vector(&mut a, "sigma_star[x3,x3]", &nn, &[]);
    vector(&mut a, "A_star[n:x4,x1]", &t, &[("x2", &mp)]);
    vector(&mut a, "A_star[n:x4,x2]", &t, &[("x1", &mep), ("x2", "-1"), ("x3", &mep)]);
    vector(&mut a, "A_star[n:x4,x3]", &t, &[("x2", &m)]);
    vector(&mut a, "D_star[x1,n:x4]", &nn, &[("n:x4", &p)]);
    vector(&mut a, "D_star[x2,n:x4]", &nn, &[("n:x4", "-1")]);
    vector(&mut a, "D_star[x3,n:x4]", &nn, &[("n:x4", EM)]);
    f.assertions = a;
    f
}

fn e6() -> ScenarioFile {
    let mut f = e5();
    f.name = "E6".into();
    if let Some(im) = f.immersion.as_mut() {
        im.normals = Some(strings(&[&["0", "0", "0", HM]]));
    }
    f.checks = names(&[
        "frames",
        "lemma4",
        "induced_duality",
        "fhts",
        "invariance",
        "lemma6",
        "lemma7",
        "xi_mu",
        "tangential",
        "phi_eta",
        "para_contact_like",
    ]);
    let t = ["x1", "x2", "x3"];
    let nn = ["n:x4"];
    let mut a = Vec::new();
    vector(&mut a, "f[x1]", &t, &[("x3", "1")]);
    vector(&mut a, "f[x2]", &t, &[]);
    vector(&mut a, "f[x3]", &t, &[("x1", "1")]);
    vector(&mut a, "h[x1]", &nn, &[]);
    vector(&mut a, "h[x2]", &nn, &[("n:x4", "1")]);
    vector(&mut a, "h[x3]", &nn, &[]);
    vector(&mut a, "t[n:x4]", &t, &[("x2", "1")]);
    vector(&mut a, "s[n:x4]", &nn, &[]);
    let p = format!("1+{EP}");
    let q = format!("1/(1+{EP})");
    vector(&mut a, "f_star[x1]", &t, &[("x3", &p)]);
    vector(&mut a, "f_star[x2]", &t, &[]);
    vector(&mut a, "f_star[x3]", &t, &[("x1", &q)]);
    vector(&mut a, "h_star[x1]", &nn, &[]);
    vector(&mut a, "h_star[x2]", &nn, &[("n:x4", "1")]);
    vector(&mut a, "h_star[x3]", &nn, &[]);
    vector(&mut a, "t_star[n:x4]", &t, &[("x2", "1")]);
    vector(&mut a, "s_star[n:x4]", &nn, &[]);
    vector(&mut a, "xi", &t, &[("x2", HM)]);
    a.push(assertion("mu", "0"));
    a.push(assertion("eta_star[x1]", "0"));
    a.push(assertion("eta_star[x2]", HP));
    a.push(assertion("eta_star[x3]", "0"));
    f.assertions = a;
    f
}

fn e7() -> ScenarioFile {
    let mut f = e6();
    f.name = "E7".into();
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
    f.tolerances = tolerances(1e-8);
    let t = ["x1", "x2", "x3"];
    let mut a = Vec::new();
    // ξ = e^{-(x1-x3)/2} ∂2, so a multiple cξ has ∂2 component c·e^{-(x1-x3)/2}.
    let k1 = format!("-(1+2*{EM})/2");
    let k1xi = format!("-(1+2*{EM})/2*{HM}");
    vector(&mut a, "nabla_xi[x1]", &t, &[("x2", &k1xi)]);
    vector(&mut a, "nabla_xi[x3]", &t, &[("x2", &k1xi)]);
    // ∇_Xξ = −φ(A_N X)+κ(X)ξ with A_N∂2 and κ(∂2) below gives
    // −e^{(x1−x3)/2}(∂1+∂3)+ξ.
    let mhp = format!("-{HP}");
    vector(&mut a, "nabla_xi[x2]", &t, &[("x1", &mhp), ("x2", HM), ("x3", &mhp)]);
    for x in ["x1", "x3"] {
        for y in t {
            vector(&mut a, &format!("nabla_phi[{x},{y}]"), &t, &[]);
        }
    }
    let c = format!("-2*cosh((x1-x3)/2)*{HM}");
    vector(&mut a, "nabla_phi[x2,x1]", &t, &[("x2", &c)]);
    vector(&mut a, "nabla_phi[x2,x2]", &t, &[("x1", EP), ("x3", EP)]);
    let e = format!("-{HM}*{HM}");
    vector(&mut a, "nabla_phi[x2,x3]", &t, &[("x2", &e)]);
    let a1 = format!("(1+{EM})*{HM}");
    let a3 = format!("{EM}*{HM}");
    vector(&mut a, "A_N[x1]", &t, &[("x2", &a1)]);
    vector(&mut a, "A_N[x2]", &t, &[("x1", HP), ("x2", HM), ("x3", HP)]);
    vector(&mut a, "A_N[x3]", &t, &[("x2", &a3)]);
    let na1 = format!("-(1+{EM})*{HM}");
    let na3 = format!("-{EM}*{HM}");
    let nhm = format!("-{HM}");
    vector(&mut a, "A_N_star[x1]", &t, &[("x2", &na1)]);
    vector(&mut a, "A_N_star[x2]", &t, &[("x1", &mhp), ("x2", &nhm), ("x3", &mhp)]);
    vector(&mut a, "A_N_star[x3]", &t, &[("x2", &na3)]);
    a.push(assertion("kappa[x1]", &k1));
    a.push(assertion("kappa[x2]", "1"));
    // Same value as κ(∂1).
    a.push(assertion("kappa[x3]", &k1));
    f.assertions = a;
    f
}

/// The document for a bundled id (E1–E7 or a synthetic id).
pub fn bundled_file(id: &str) -> Result<ScenarioFile> {
    let up = id.trim();
    match up.to_ascii_uppercase().as_str() {
        "E1" => Ok(e1()),
        "E2" => Ok(e2()),
        "E3" => Ok(e3()),
        "E4" => Ok(e4()),
        "E5" => Ok(e5()),
        "E6" => Ok(e6()),
        "E7" => Ok(e7()),
        _ => super::synthetic::synthetic_file(up).ok_or_else(|| Error::UnknownBundled(id.to_string())),
    }
}

pub fn bundled_scenario(id: &str) -> Result<ScenarioDoc> {
    compile(&bundled_file(id)?)
}

/// Rebuild a slice example with other values of the fixed ambient
/// coordinates: (x2, x4) for E3/E4, x4 for E5–E7.
pub fn with_slice_constants(id: &str, constants: &[f64]) -> Result<ScenarioFile> {
    let mut f = bundled_file(id)?;
    let slots: &[usize] = match f.name.as_str() {
        "E3" | "E4" => &[1, 3],
        "E5" | "E6" | "E7" => &[3],
        _ => &[],
    };
    if slots.len() != constants.len() {
        return Err(Error::Dimension {
            field: "slice constants".into(),
            message: format!("`{id}` has {} fixed coordinates, got {}", slots.len(), constants.len()),
        });
    }
    let im = f.immersion.as_mut().expect("slice examples have an immersion");
    for (&i, &c) in slots.iter().zip(constants) {
        im.map[i] = format!("{c:?}");
    }
    Ok(f)
}
