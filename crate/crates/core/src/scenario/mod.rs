//! Scenario documents: the on-disk schema, loading and validation, and the
//! bundled and synthetic scenarios.

pub mod assertions;
pub mod bundled;
pub mod synthetic;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, ExprTree};
use crate::geometry::{AmbientJets, ChartGeometry, Connection, SamplePlan, StructureField};
use crate::submanifold::{Immersion, SubmanifoldJets};
use crate::tensor::Arr;

pub use assertions::{Assertion, Target};

pub const DEFAULT_TOLERANCE: f64 = 1.0e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldFile {
    pub dim: usize,
    pub coords: Vec<String>,
    #[serde(rename = "box")]
    pub bbox: Vec<[f64; 2]>,
    pub metric: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionFile {
    /// `gamma[k][i][j]` is Γ^k_{ij}.
    pub gamma: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    #[serde(rename = "F")]
    pub f: Vec<Vec<String>>,
    #[serde(rename = "expected_F_star", default, skip_serializing_if = "Option::is_none")]
    pub expected_f_star: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionFile {
    pub dim: usize,
    pub coords: Vec<String>,
    #[serde(rename = "box")]
    pub bbox: Vec<[f64; 2]>,
    pub map: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub c: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesFile {
    #[serde(default = "default_tol")]
    pub default: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<String, f64>,
}

impl Default for TolerancesFile {
    fn default() -> Self {
        TolerancesFile {
            default: DEFAULT_TOLERANCE,
            overrides: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleFile {
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_random")]
    pub random: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_grid() -> usize {
    SamplePlan::default().grid
}
fn default_random() -> usize {
    SamplePlan::default().random
}
fn default_seed() -> u64 {
    SamplePlan::default().seed
}

impl Default for SampleFile {
    fn default() -> Self {
        let p = SamplePlan::default();
        SampleFile {
            grid: p.grid,
            random: p.random,
            seed: p.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionFile {
    pub name: String,
    pub target: String,
    pub expr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// The document as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub manifold: ManifoldFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub immersion: Option<ImmersionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelFile>,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub tolerances: TolerancesFile,
    #[serde(default)]
    pub sample: SampleFile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<AssertionFile>,
}

impl ScenarioFile {
    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }
}

/// A parsed and compiled scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDoc {
    pub name: String,
    pub geom: ChartGeometry,
    pub expected_f_star: Option<Arr<ExprTree>>,
    pub immersion: Option<Immersion>,
    pub model_c: Option<f64>,
    pub checks: Vec<String>,
    pub tolerance: f64,
    pub overrides: BTreeMap<String, f64>,
    pub plan: SamplePlan,
    pub assertions: Vec<Assertion>,
    /// The source document, when the scenario came from one.
    pub file: Option<ScenarioFile>,
}

impl ScenarioDoc {
    pub fn tolerance_for(&self, check: &str) -> f64 {
        self.overrides.get(check).copied().unwrap_or(self.tolerance)
    }

    /// Coordinates the sample points live in.
    pub fn sample_bounds(&self) -> &[(f64, f64)] {
        match &self.immersion {
            Some(imm) => &imm.bounds,
            None => &self.geom.bounds,
        }
    }

    pub fn sample_coords(&self) -> &[String] {
        match &self.immersion {
            Some(imm) => &imm.coords,
            None => &self.geom.coords,
        }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.plan.points(self.sample_bounds())
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn expr(src: &str, coords: &[String], path: &str) -> Result<ExprTree> {
    parse_expr(src, coords).map_err(|e| schema(path, e.to_string()))
}

fn check_coords(coords: &[String], dim: usize, path: &str) -> Result<()> {
    if coords.len() != dim {
        return Err(Error::Dimension {
            field: format!("{path}.coords"),
            message: format!("expected {dim} names, found {}", coords.len()),
        });
    }
    for (i, c) in coords.iter().enumerate() {
        let ok = c.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_')
            && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
        if !ok || crate::expr::Func::from_name(c).is_some() {
            return Err(schema(format!("{path}.coords[{i}]"), format!("invalid coordinate name `{c}`")));
        }
        if coords[..i].contains(c) {
            return Err(schema(format!("{path}.coords[{i}]"), format!("duplicate coordinate name `{c}`")));
        }
    }
    Ok(())
}

fn bounds(b: &[[f64; 2]], dim: usize, path: &str) -> Result<Vec<(f64, f64)>> {
    if b.len() != dim {
        return Err(Error::Dimension {
            field: format!("{path}.box"),
            message: format!("expected {dim} intervals, found {}", b.len()),
        });
    }
    b.iter()
        .enumerate()
        .map(|(i, &[lo, hi])| {
            if lo.is_finite() && hi.is_finite() && lo <= hi {
                Ok((lo, hi))
            } else {
                Err(schema(format!("{path}.box[{i}]"), "interval must be finite with lo <= hi"))
            }
        })
        .collect()
}

fn matrix(rows: &[Vec<String>], n: usize, m: usize, coords: &[String], path: &str) -> Result<Arr<ExprTree>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != m) {
        let shape: Vec<usize> = rows.iter().map(|r| r.len()).collect();
        return Err(Error::Dimension {
            field: path.into(),
            message: format!("expected {n}x{m}, found {} rows of lengths {shape:?}", rows.len()),
        });
    }
    Arr::try_from_fn(&[n, m], |i| {
        expr(&rows[i[0]][i[1]], coords, &format!("{path}[{}][{}]", i[0], i[1]))
    })
}

/// Compile a document into a scenario. Assertions are parsed too.
pub fn compile(file: &ScenarioFile) -> Result<ScenarioDoc> {
    let mf = &file.manifold;
    let n = mf.dim;
    if n == 0 {
        return Err(schema("manifold.dim", "dimension must be positive"));
    }
    check_coords(&mf.coords, n, "manifold")?;
    let coords = &mf.coords;
    let metric = matrix(&mf.metric, n, n, coords, "manifold.metric")?;
    let connection = match &file.connection {
        None => Connection::LeviCivita,
        Some(c) => {
            let g = &c.gamma;
            if g.len() != n || g.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
                return Err(Error::Dimension {
                    field: "connection.gamma".into(),
                    message: format!("expected {n}x{n}x{n}"),
                });
            }
            Connection::Explicit(Arr::try_from_fn(&[n, n, n], |i| {
                expr(
                    &g[i[0]][i[1]][i[2]],
                    coords,
                    &format!("connection.gamma[{}][{}][{}]", i[0], i[1], i[2]),
                )
            })?)
        }
    };
    let (structure, expected_f_star) = match &file.structure {
        None => (None, None),
        Some(s) => {
            let f = matrix(&s.f, n, n, coords, "structure.F")?;
            let e = match &s.expected_f_star {
                Some(rows) => Some(matrix(rows, n, n, coords, "structure.expected_F_star")?),
                None => None,
            };
            (Some(StructureField { f }), e)
        }
    };
    let geom = ChartGeometry {
        coords: coords.clone(),
        bounds: bounds(&mf.bbox, n, "manifold")?,
        metric,
        connection,
        structure,
    };
    let immersion = match &file.immersion {
        None => None,
        Some(im) => {
            let m = im.dim;
            if m == 0 {
                return Err(schema("immersion.dim", "dimension must be positive"));
            }
            check_coords(&im.coords, m, "immersion")?;
            if im.map.len() != n {
                return Err(Error::Dimension {
                    field: "immersion.map".into(),
                    message: format!("expected {n} components, found {}", im.map.len()),
                });
            }
            let map = im
                .map
                .iter()
                .enumerate()
                .map(|(i, s)| expr(s, &im.coords, &format!("immersion.map[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let normals = match &im.normals {
                None => None,
                Some(rows) => {
                    if m >= n || rows.len() != n - m {
                        return Err(Error::Dimension {
                            field: "immersion.normals".into(),
                            message: format!("expected {} normal fields, found {}", n.saturating_sub(m), rows.len()),
                        });
                    }
                    let mut out = Vec::new();
                    for (a, r) in rows.iter().enumerate() {
                        if r.len() != n {
                            return Err(Error::Dimension {
                                field: format!("immersion.normals[{a}]"),
                                message: format!("expected {n} components, found {}", r.len()),
                            });
                        }
                        out.push(
                            r.iter()
                                .enumerate()
                                .map(|(i, s)| expr(s, &im.coords, &format!("immersion.normals[{a}][{i}]")))
                                .collect::<Result<Vec<_>>>()?,
                        );
                    }
                    Some(out)
                }
            };
            Some(Immersion {
                coords: im.coords.clone(),
                bounds: bounds(&im.bbox, m, "immersion")?,
                map,
                normals,
            })
        }
    };
    if let Some(imm) = &immersion {
        if imm.dim() >= n {
            return Err(Error::NoNormalSpace { m: imm.dim(), n });
        }
    }
    for (i, c) in file.checks.iter().enumerate() {
        if crate::checks::lookup(c).is_none() {
            return Err(schema(format!("checks[{i}]"), Error::UnknownCheck(c.clone()).to_string()));
        }
    }
    for (name, tol) in &file.tolerances.overrides {
        if crate::checks::lookup(name).is_none() && !name.starts_with(assertions::PREFIX) {
            return Err(schema(format!("tolerances.overrides.{name}"), Error::UnknownCheck(name.clone()).to_string()));
        }
        if !(*tol > 0.0) {
            return Err(schema(format!("tolerances.overrides.{name}"), "tolerance must be positive"));
        }
    }
    if !(file.tolerances.default > 0.0) {
        return Err(schema("tolerances.default", "tolerance must be positive"));
    }
    let sample_coords = match &immersion {
        Some(imm) => imm.coords.clone(),
        None => coords.clone(),
    };
    let mut names = std::collections::BTreeSet::new();
    let mut asserts = Vec::new();
    for (i, a) in file.assertions.iter().enumerate() {
        if !names.insert(a.name.clone()) {
            return Err(schema(format!("assertions[{i}].name"), format!("duplicate assertion `{}`", a.name)));
        }
        asserts.push(Assertion::parse(a, coords, immersion.as_ref(), &sample_coords, i)?);
    }
    let plan = SamplePlan {
        grid: file.sample.grid,
        random: file.sample.random,
        seed: file.sample.seed,
    };
    if plan.grid == 0 && plan.random == 0 {
        return Err(schema("sample", "the sample plan must contain at least one point"));
    }
    Ok(ScenarioDoc {
        name: file.name.clone(),
        geom,
        expected_f_star,
        immersion,
        model_c: file.model.as_ref().map(|m| m.c),
        checks: file.checks.clone(),
        tolerance: file.tolerances.default,
        overrides: file.tolerances.overrides.clone(),
        plan,
        assertions: asserts,
        file: Some(file.clone()),
    })
}

/// Parse, compile and validate a document. Validation diagnostics become a
/// schema error naming the first problem.
pub fn load_scenario(text: &str) -> Result<ScenarioDoc> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
        schema(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let doc = compile(&file)?;
    let diags = validate_scenario(&doc);
    if let Some(d) = diags.first() {
        return Err(schema("probe", d.clone()));
    }
    Ok(doc)
}

pub fn load_scenario_file(path: &std::path::Path) -> Result<ScenarioDoc> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_scenario(&text)
}

fn center(b: &[(f64, f64)]) -> Vec<f64> {
    b.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
}

/// Diagnostics from a probe evaluation at the box center; empty when the
/// scenario is usable.
pub fn validate_scenario(doc: &ScenarioDoc) -> Vec<String> {
    let mut out = Vec::new();
    let p = center(&doc.geom.bounds);
    match AmbientJets::at(&doc.geom, &p) {
        Err(Error::SingularMetric { point, condition }) => {
            out.push(format!("singular metric at probe point {point:?} (condition number {condition:e})"))
        }
        Err(e) => out.push(format!("ambient probe failed: {e}")),
        Ok(_) => {}
    }
    if let Some(imm) = &doc.immersion {
        let u = center(&imm.bounds);
        match SubmanifoldJets::compute(&doc.geom, imm, &u) {
            Err(Error::RankDeficient { point, singular }) => out.push(format!(
                "rank deficiency of the immersion at probe point {point:?} (smallest singular value {singular:e})"
            )),
            Err(e) => out.push(format!("immersion probe failed: {e}")),
            Ok(_) => {}
        }
    }
    out
}
