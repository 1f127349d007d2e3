//! The check catalog and the runner that evaluates a scenario's checks over
//! its sample plan.
//!
//! Per-point data is computed once per run and shared by every check. Checks
//! run concurrently; all aggregation is in point-index order, so reports do
//! not depend on scheduling.

pub mod ambient;

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{constant_curvature_model, fit_scalar_model, CurvatureFit, ConnectionKind, SamplePlan};
use crate::hypersurface::{self as hyp, HypersurfaceAt, NON_TANGENTIAL_MU};
use crate::linalg::identity;
use crate::product::model_curvature_eq_o;
use crate::report::{CheckReport, PointRecord, Real, RunReport};
use crate::scenario::assertions::{PointData, PREFIX};
use crate::scenario::ScenarioDoc;
use crate::submanifold::identities::{self as ids, Named};
use crate::submanifold::{InducedGeometryAt, Invariance, InvarianceClass};

/// Where a check applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Ambient,
    Submanifold,
    Hypersurface,
}

impl Scope {
    pub fn label(self) -> &'static str {
        match self {
            Scope::Ambient => "ambient",
            Scope::Submanifold => "submanifold",
            Scope::Hypersurface => "hypersurface",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckInfo {
    pub name: &'static str,
    pub scope: Scope,
    pub description: &'static str,
    /// The relation being tested, written out.
    pub anchor: &'static str,
}

const fn info(name: &'static str, scope: Scope, description: &'static str, anchor: &'static str) -> CheckInfo {
    CheckInfo {
        name,
        scope,
        description,
        anchor,
    }
}

use Scope::{Ambient as Am, Hypersurface as Hy, Submanifold as Sm};

pub const CATALOG: &[CheckInfo] = &[
    info("statistical", Am, "connection is torsion-free and ∇g is totally symmetric", "Γ^k_ij = Γ^k_ji; (∇_X g)(Y,Z) = (∇_Y g)(X,Z)"),
    info("dual_involution", Am, "the dual of the dual connection is the primal one", "Xg(Y,Z) = g(∇_X Y,Z) + g(Y,∇*_X Z); (∇*)* = ∇"),
    info("mean_connection_metric", Am, "the mean connection is metric", "(∇°g) = 0, ∇° = (∇ + ∇*)/2"),
    info("curvature_duality", Am, "lowered curvatures of ∇ and ∇* are skew-paired", "g(R(X,Y)Z,W) = −g(Z,R*(X,Y)W)"),
    info("bianchi", Am, "first Bianchi identity for ∇ and ∇*", "R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0"),
    info("almost_product_like", Am, "F and its conjugate are involutions compatible with g; F ≠ ±I", "F² = I, (F*)² = I, g(FX,F*Y) = g(X,Y), g(FX,Y) = g(X,F*Y)"),
    info("structure_pairing", Am, "covariant derivatives of F and F* are g-adjoint", "g((∇_X F)Y,Z) = g(Y,(∇*_X F*)Z)"),
    info("projectors", Am, "projectors built from F", "P = (I+F)/2, Q = (I−F)/2: P+Q = I, P² = P, Q² = Q, F = P−Q"),
    info("expected_F_star", Am, "derived conjugate against the scenario's expected matrix", "F* = g⁻¹Fᵀg"),
    info("nabla_F", Am, "F is ∇-parallel and F* is ∇*-parallel", "∇F = 0, ∇*F* = 0"),
    info("eq_o", Am, "curvature of ∇ and ∇* against the product-curvature model", "R(X,Y)Z = c[g(Y,Z)X − g(X,Z)Y + g(Y,FZ)FX − g(X,FZ)FY + (g(FX,Y) − g(X,FY))FZ]"),
    info("lemma3", Am, "parallel F ≠ ±I rules out nonzero constant curvature", "∇F = 0, F ≠ ±I, R = c(g(Y,Z)X − g(X,Z)Y) ⇒ c = 0; |tr F| ≤ n"),
    info("constant_curvature", Am, "least-squares constant-curvature fit of ∇ (∇* in the note)", "R(X,Y)Z = c(g(Y,Z)X − g(X,Z)Y)"),
    info("frames", Sm, "tangent and normal frames are g̃-orthogonal, normals orthonormal", "g̃(e_a,V_α) = 0, g̃(V_α,V_β) = δ_αβ"),
    info("lemma4", Sm, "second fundamental forms pair with the opposite shape operators", "g̃(σ(X,Y),V) = g(Y,A*_V X), g̃(σ*(X,Y),V) = g(Y,A_V X)"),
    info("induced_duality", Sm, "induced connections and normal connections are dual pairs", "Xg(Y,Z) = g(∇_X Y,Z) + g(Y,∇*_X Z); Xg̃(U,V) = g̃(D_X U,V) + g̃(U,D*_X V)"),
    info("fhts", Sm, "tangential and normal blocks of F and F*", "FX = fX + hX, FV = tV + sV: f² = I − th, hf + sh = 0, ft + ts = 0, s² = I − ht"),
    info("invariance", Sm, "invariance class of the submanifold under F", "h = 0 ⇔ t* = 0, f = 0 ⇔ f* = 0, s = 0 ⇔ s* = 0, t = 0 ⇔ h* = 0"),
    info("lemma6", Sm, "f and s are parallel together with their conjugates", "g((∇_Z f)X,Y) = g(X,(∇*_Z f*)Y); ∇f = 0 ⇔ ∇*f* = 0"),
    info("lemma7", Sm, "covariant derivatives of f, h, t, s under parallel F", "(∇_X f)Y = A_{hY}X + t(σ(X,Y)), (D̄_X h)Y = −σ(X,fY) + s(σ(X,Y)), ..."),
    info("gauss_codazzi_ricci", Sm, "Gauss, Codazzi and Ricci equations for both families", "g̃(R̃(X,Y)Z,W) = g(R(X,Y)Z,W) + g̃(σ(X,Z),σ*(Y,W)) − g̃(σ(Y,Z),σ*(X,W)), ..."),
    info("structure_curvature", Sm, "tangential and normal parts of R̃F = FR̃", "R(X,Y)fZ − A_{σ(Y,fZ)}X + A_{σ(X,fZ)}Y = f(R(X,Y)Z) − ..."),
    info("totally_geodesic", Sm, "second fundamental forms and shape operators vanish", "σ = σ* = 0, A = A* = 0"),
    info("totally_umbilical", Sm, "mean-connection shape operator is a multiple of the identity", "A°_V = ρ(V) I"),
    info("minimal", Sm, "mean-connection shape operator is trace-free", "tr A°_V = 0"),
    info("eq_o_submanifold", Sm, "submanifold equations under the product-curvature model", "R(X,Y)Z = c[g(Y,Z)X − g(X,Z)Y + g(Y,fZ)fX − ...] + A_{σ(Y,Z)}X − A_{σ(X,Z)}Y; Dσ = 0 ⇒ c = 0 or h = 0 or f = 0"),
    info("xi_mu", Hy, "decomposition of FN and F*N", "FN = ξ + μN, F*N = ξ* + μN, 1 − μ² = g(ξ,ξ*)"),
    info("tangential", Hy, "FN is tangent (μ = 0)", "μ = 0; s = s* = 0"),
    info("phi_eta", Hy, "φ, η structure on a tangential hypersurface", "φ²X = X − η*(X)ξ, η*(φX) = 0, φξ = 0, η*(ξ) = 1 and conjugates"),
    info("kappa", Hy, "the normal 1-forms κ, κ* and the scalar forms", "κ(X) = g̃(∇̃_X N,N), κ + κ* = 0, 'σ(X,Y) = g(A*_N X,Y)"),
    info("prop5a", Hy, "covariant derivative of ξ and ξ*", "∇_X ξ = −φ(A_N X) + κ(X)ξ, ∇*_X ξ* = −φ*(A*_N X) − κ(X)ξ*, ..."),
    info("prop8a", Hy, "covariant derivative of φ and φ*", "(∇_X φ)Y = g(A*_N X,Y)ξ + η*(Y)A_N X and conjugate"),
    info("curvature_xi", Hy, "curvature along ξ and the ambient curvature decompositions", "R(X,Y)ξ = −φ((∇̄_X A)_N Y) + φ((∇̄_Y A)_N X) + ..."),
    info("tk_identities", Hy, "tangential hypersurface equations under the product-curvature model", "R(X,Y)Z = c[...] + g(A*_N Y,Z)A_N X − g(A*_N X,Z)A_N Y; g([A_N,A*_N]X,Y) − dκ(X,Y) = c(η(X)η*(Y) − η(Y)η*(X)); 'σ = 0 ⇒ c = 0"),
    info("para_contact_like", Hy, "almost para contact-like axioms and metric compatibility", "φ² = I − η*⊗ξ, φξ = 0, η(ξ*) = 1, η∘φ* = 0, conjugates; g(φX,φ*Y) = g(X,Y) − η*(X)η(Y)"),
];

pub fn catalog() -> &'static [CheckInfo] {
    CATALOG
}

pub fn lookup(name: &str) -> Option<&'static CheckInfo> {
    CATALOG.iter().find(|c| c.name == name)
}

/// Fixed thresholds of the scenario-level properties.
pub const LEMMA3_FIT_RESIDUAL: f64 = 1.0e-6;
pub const FLAT_C: f64 = 1.0e-8;
pub const NONTRIVIAL_F: f64 = 1.0e-6;
pub const TRIVIAL_F: f64 = 1.0e-10;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Replaces the scenario's check list.
    pub checks: Option<Vec<String>>,
    /// Replaces the default tolerance and every per-check override.
    pub tolerance: Option<f64>,
    pub plan: Option<SamplePlan>,
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn named_max(n: &Named) -> f64 {
    n.iter().fold(0.0, |a, (_, r)| nan_max(a, *r))
}

/// Shared state of one run.
pub struct Ctx<'a> {
    pub doc: &'a ScenarioDoc,
    pub pts: Vec<PointData>,
    tol_override: Option<f64>,
    nabla_f: OnceLock<Option<f64>>,
    model_c: OnceLock<Option<(f64, bool)>>,
    hyps: OnceLock<Option<Result<Vec<HypersurfaceAt>>>>,
}

impl<'a> Ctx<'a> {
    pub fn new(doc: &'a ScenarioDoc, plan: &SamplePlan, tol_override: Option<f64>) -> Result<Ctx<'a>> {
        let points = plan.points(doc.sample_bounds());
        let pts = points
            .par_iter()
            .map(|u| PointData::compute(&doc.geom, doc.immersion.as_ref(), u))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ctx {
            doc,
            pts,
            tol_override,
            nabla_f: OnceLock::new(),
            model_c: OnceLock::new(),
            hyps: OnceLock::new(),
        })
    }

    pub fn tolerance(&self, check: &str) -> f64 {
        self.tol_override.unwrap_or_else(|| self.doc.tolerance_for(check))
    }

    /// Largest |∇F|, |∇*F*| over the sampled ambient points.
    fn nabla_f_max(&self) -> Option<f64> {
        *self.nabla_f.get_or_init(|| {
            let v: Option<Vec<f64>> = self.pts.par_iter().map(|p| ambient::nabla_f(&p.ambient).map(|n| named_max(&n))).collect();
            v.map(|v| v.into_iter().fold(0.0, nan_max))
        })
    }

    fn f_parallel(&self) -> bool {
        self.nabla_f_max().is_some_and(|m| m < self.tolerance("nabla_F"))
    }

    /// The model constant and whether it was fitted.
    fn model_c(&self) -> Option<(f64, bool)> {
        *self.model_c.get_or_init(|| {
            if let Some(c) = self.doc.model_c {
                return Some((c, false));
            }
            let samples: Option<Vec<_>> = self
                .pts
                .iter()
                .map(|p| {
                    let f = p.ambient.structure_values()?;
                    let g = p.ambient.metric();
                    Some((p.ambient.curvature(ConnectionKind::Primal).r, model_curvature_eq_o(&g, &f, 1.0)))
                })
                .collect();
            let fit = fit_scalar_model(&samples?);
            Some((fit.c.unwrap_or(0.0), true))
        })
    }

    fn hypersurfaces(&self) -> Option<std::result::Result<&[HypersurfaceAt], Error>> {
        let v = self.hyps.get_or_init(|| {
            self.doc.immersion.as_ref()?;
            Some(self.pts.par_iter().map(|p| p.hypersurface().expect("immersion present")).collect())
        });
        v.as_ref().map(|r| r.as_deref().map_err(Clone::clone))
    }

    fn record(&self, i: usize, residual: f64) -> PointRecord {
        PointRecord {
            x: self.pts[i].u.iter().map(|v| Real(*v)).collect(),
            residual: Real(residual),
        }
    }

    /// Evaluate a per-point identity list and aggregate it.
    fn pointwise<T: Sync>(
        &self,
        name: &str,
        items: &[T],
        f: impl Fn(&T) -> Result<Named> + Sync,
    ) -> Result<CheckReport> {
        let per: Vec<Named> = items.par_iter().map(&f).collect::<Result<_>>()?;
        let mut idents: Vec<(String, f64)> = Vec::new();
        let mut points = Vec::with_capacity(per.len());
        for (i, named) in per.iter().enumerate() {
            for (k, r) in named {
                match idents.iter_mut().find(|(n, _)| n == k) {
                    Some(e) => e.1 = nan_max(e.1, *r),
                    None => idents.push((k.to_string(), *r)),
                }
            }
            points.push(self.record(i, named_max(named)));
        }
        Ok(CheckReport::from_residuals(name, self.tolerance(name), points, idents))
    }

    fn skip(&self, name: &str, reason: impl Into<String>) -> CheckReport {
        CheckReport::skipped(name, self.tolerance(name), reason)
    }

    fn worst_point(&self, vals: &[f64]) -> (usize, f64) {
        vals.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) })
    }

    fn fmt_point(&self, i: usize) -> String {
        let s: Vec<String> = self.pts[i].u.iter().map(|v| format!("{v:.6}")).collect();
        format!("({})", s.join(", "))
    }
}

pub fn run_scenario(doc: &ScenarioDoc, opts: &RunOptions) -> Result<RunReport> {
    let plan = opts.plan.unwrap_or(doc.plan);
    let names: Vec<String> = match &opts.checks {
        Some(list) => list.clone(),
        None => doc
            .checks
            .iter()
            .cloned()
            .chain(doc.assertions.iter().map(|a| a.check_name()))
            .collect(),
    };
    for n in &names {
        let known = lookup(n).is_some() || doc.assertions.iter().any(|a| &a.check_name() == n);
        if !known {
            return Err(Error::UnknownCheck(n.clone()));
        }
    }
    let ctx = Ctx::new(doc, &plan, opts.tolerance)?;
    let reports = names.par_iter().map(|n| run_check(&ctx, n)).collect::<Result<Vec<_>>>()?;
    Ok(RunReport::new(&doc.name, plan.seed, reports))
}

pub fn run_check(ctx: &Ctx, name: &str) -> Result<CheckReport> {
    if let Some(short) = name.strip_prefix(PREFIX) {
        return assertion_check(ctx, name, short);
    }
    let info = lookup(name).ok_or_else(|| Error::UnknownCheck(name.to_string()))?;
    match info.scope {
        Scope::Ambient => ambient_check(ctx, name),
        Scope::Submanifold => submanifold_check(ctx, name),
        Scope::Hypersurface => hypersurface_check(ctx, name),
    }
}

fn assertion_check(ctx: &Ctx, name: &str, short: &str) -> Result<CheckReport> {
    let a = ctx
        .doc
        .assertions
        .iter()
        .find(|a| a.name == short)
        .ok_or_else(|| Error::UnknownCheck(name.to_string()))?;
    let tol = a.tolerance.unwrap_or_else(|| ctx.tolerance(name));
    let rs: Vec<f64> = ctx.pts.par_iter().map(|p| a.residual(p)).collect::<Result<_>>()?;
    let points = rs.iter().enumerate().map(|(i, r)| ctx.record(i, *r)).collect();
    let max = rs.iter().copied().fold(0.0, nan_max);
    Ok(CheckReport::from_residuals(name, tol, points, vec![("value".into(), max)])
        .with_note(format!("{} = {}", a.target.text, a.expr)))
}

const NO_STRUCTURE: &str = "scenario has no structure F";

fn ambient_check(ctx: &Ctx, name: &str) -> Result<CheckReport> {
    let pts = &ctx.pts;
    let need = |o: Option<Named>| o.ok_or(());
    let structured = ctx.doc.geom.structure.is_some();
    let needs_structure = matches!(
        name,
        "almost_product_like" | "structure_pairing" | "projectors" | "expected_F_star" | "nabla_F" | "eq_o" | "lemma3"
    );
    if needs_structure && !structured {
        return Ok(ctx.skip(name, NO_STRUCTURE));
    }
    let unwrap = |r: std::result::Result<Named, ()>| r.map_err(|_| Error::UnknownCheck(name.to_string()));
    match name {
        "statistical" => ctx.pointwise(name, pts, |p| Ok(ambient::statistical(&p.ambient))),
        "dual_involution" => ctx.pointwise(name, pts, |p| Ok(ambient::dual_involution(&p.ambient))),
        "mean_connection_metric" => ctx.pointwise(name, pts, |p| Ok(ambient::mean_connection_metric(&p.ambient))),
        "curvature_duality" => ctx.pointwise(name, pts, |p| Ok(ambient::curvature_duality(&p.ambient))),
        "bianchi" => ctx.pointwise(name, pts, |p| Ok(ambient::bianchi(&p.ambient))),
        "structure_pairing" => ctx.pointwise(name, pts, |p| unwrap(need(ambient::structure_pairing(&p.ambient)))),
        "projectors" => ctx.pointwise(name, pts, |p| unwrap(need(ambient::projectors(&p.ambient)))),
        "nabla_F" => ctx.pointwise(name, pts, |p| unwrap(need(ambient::nabla_f(&p.ambient)))),
        "almost_product_like" => {
            let rep = ctx.pointwise(name, pts, |p| unwrap(need(ambient::almost_product_like(&p.ambient))))?;
            let dist: Vec<(f64, f64)> = pts
                .iter()
                .map(|p| ambient::distance_to_identity(&p.ambient.structure_values().expect("structure")))
                .collect();
            if dist.iter().all(|d| d.0 < TRIVIAL_F) {
                return Ok(rep.failed("trivial structure: F = I at every sampled point"));
            }
            if dist.iter().all(|d| d.1 < TRIVIAL_F) {
                return Ok(rep.failed("trivial structure: F = −I at every sampled point"));
            }
            Ok(rep)
        }
        "expected_F_star" => {
            let Some(exp) = &ctx.doc.expected_f_star else {
                return Ok(ctx.skip(name, "scenario declares no expected F*"));
            };
            ctx.pointwise(name, pts, |p| {
                let fs = p.ambient.conjugate_values().expect("structure");
                let mut r: f64 = 0.0;
                for (a, e) in fs.iter().zip(exp.iter()) {
                    r = nan_max(r, (a - e.eval_value(&p.x)?).abs());
                }
                Ok(vec![("f_star_entries", r)])
            })
        }
        "eq_o" => {
            let (c, fitted) = ctx.model_c().expect("structure");
            let rep = ctx.pointwise(name, pts, |p| unwrap(need(ambient::eq_o(&p.ambient, c))))?;
            let how = if fitted { "fitted" } else { "declared" };
            Ok(rep.with_note(format!("c = {c:.12e} ({how})")))
        }
        "lemma3" => lemma3(ctx, name),
        "constant_curvature" => constant_curvature(ctx, name),
        _ => Err(Error::UnknownCheck(name.to_string())),
    }
}

fn curvature_fit(ctx: &Ctx, kind: ConnectionKind) -> CurvatureFit {
    let samples: Vec<_> = ctx
        .pts
        .iter()
        .map(|p| (p.ambient.curvature(kind).r, constant_curvature_model(&p.ambient.metric())))
        .collect();
    fit_scalar_model(&samples)
}

fn fmt_fit(fit: &CurvatureFit) -> String {
    match fit.c {
        Some(c) => format!("c = {c:.12e}, residual = {:.3e}", fit.residual),
        None => format!("c indeterminate, residual = {:.3e}", fit.residual),
    }
}

fn constant_curvature(ctx: &Ctx, name: &str) -> Result<CheckReport> {
    let fit = curvature_fit(ctx, ConnectionKind::Primal);
    let dual = curvature_fit(ctx, ConnectionKind::Dual);
    let rep = CheckReport::from_residuals(name, ctx.tolerance(name), Vec::new(), vec![("fit_residual".into(), fit.residual)]);
    Ok(rep.with_note(format!("∇: {}; ∇*: {}", fmt_fit(&fit), fmt_fit(&dual))))
}

fn lemma3(ctx: &Ctx, name: &str) -> Result<CheckReport> {
    if !ctx.f_parallel() {
        return Ok(ctx.skip(name, "F is not parallel"));
    }
    let nontrivial = ctx.pts.iter().any(|p| {
        let (a, b) = ambient::distance_to_identity(&p.ambient.structure_values().expect("structure"));
        a > NONTRIVIAL_F && b > NONTRIVIAL_F
    });
    if !nontrivial {
        return Ok(ctx.skip(name, "F = ±I at every sampled point"));
    }
    let fit = curvature_fit(ctx, ConnectionKind::Primal);
    let c = fit.c.unwrap_or(0.0);
    // A constant-curvature fit is only a counterexample when it is both good and nonzero.
    let violation = if fit.residual < LEMMA3_FIT_RESIDUAL && c.abs() >= FLAT_C { c.abs() } else { 0.0 };
    let trace = ctx
        .pts
        .iter()
        .map(|p| ambient::trace_excess(&p.ambient).expect("structure"))
        .fold(0.0, nan_max);
    let rep = CheckReport::from_residuals(
        name,
        ctx.tolerance(name),
        Vec::new(),
        vec![("nonflat_constant_curvature".into(), violation), ("trace_bound".into(), trace)],
    );
    Ok(rep.with_note(fmt_fit(&fit)))
}

fn igs<'c>(ctx: &'c Ctx) -> Vec<&'c InducedGeometryAt> {
    ctx.pts.iter().map(|p| p.ig.as_ref().expect("immersion present")).collect()
}

/// Mismatch of an equivalence a < tol ⇔ b < tol.
fn equivalence(a: f64, b: f64, tol: f64) -> f64 {
    if (a < tol) != (b < tol) {
        a.max(b)
    } else {
        0.0
    }
}

fn submanifold_check(ctx: &Ctx, name: &str) -> Result<CheckReport> {
    if ctx.doc.immersion.is_none() {
        return Ok(ctx.skip(name, "scenario has no immersion"));
    }
    let needs_structure = matches!(
        name,
        "fhts" | "invariance" | "lemma6" | "lemma7" | "structure_curvature" | "eq_o_submanifold"
    );
    if needs_structure && ctx.doc.geom.structure.is_none() {
        return Ok(ctx.skip(name, NO_STRUCTURE));
    }
    if matches!(name, "lemma7" | "structure_curvature") && !ctx.f_parallel() {
        return Ok(ctx.skip(name, "ambient F is not parallel"));
    }
    let igs = igs(ctx);
    let tol = ctx.tolerance(name);
    match name {
        "frames" => ctx.pointwise(name, &igs, |ig| Ok(ids::frame_residuals(ig))),
        "lemma4" => ctx.pointwise(name, &igs, |ig| Ok(ids::lemma4_residuals(ig))),
        "induced_duality" => ctx.pointwise(name, &igs, |ig| Ok(ids::duality_residuals(ig))),
        "fhts" => ctx.pointwise(name, &igs, |ig| Ok(ids::fhts_residuals(ig))),
        "lemma7" => ctx.pointwise(name, &igs, |ig| Ok(ids::lemma7_residuals(ig))),
        "gauss_codazzi_ricci" => ctx.pointwise(name, &igs, |ig| Ok(ids::gauss_codazzi_ricci_residuals(ig))),
        "structure_curvature" => ctx.pointwise(name, &igs, |ig| Ok(ids::structure_curvature_residuals(ig))),
        "totally_geodesic" => ctx.pointwise(name, &igs, |ig| {
            Ok(vec![
                ("sigma", ig.primal.sigma.max_abs()),
                ("sigma_star", ig.dual.sigma.max_abs()),
                ("A", ig.primal.shape.max_abs()),
                ("A_star", ig.dual.shape.max_abs()),
            ])
        }),
        "totally_umbilical" => umbilical(ctx, name, &igs),
        "minimal" => {
            let rep = ctx.pointwise(name, &igs, |ig| {
                let t = ids::umbilicity(&mean_shape(ig)).iter().fold(0.0, |a, u| nan_max(a, u.2.abs()));
                Ok(vec![("trace_mean", t)])
            })?;
            let tr = |s: &crate::tensor::Arr<f64>| ids::umbilicity(s).iter().map(|u| u.2).collect::<Vec<_>>();
            let first = igs[0];
            Ok(rep.with_note(format!(
                "at first point: tr A = {:?}, tr A* = {:?}",
                tr(&first.primal.shape),
                tr(&first.dual.shape)
            )))
        }
        "invariance" => invariance(ctx, name, &igs, tol),
        "lemma6" => {
            let rep = ctx.pointwise(name, &igs, |ig| Ok(ids::lemma6_residuals(ig)))?;
            let (mut pf, mut ps, mut df, mut ds) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for ig in &igs {
                let (a, b) = ids::parallel_sizes(&ig.primal).expect("structure");
                let (c, d) = ids::parallel_sizes(&ig.dual).expect("structure");
                pf = pf.max(a);
                ps = ps.max(b);
                df = df.max(c);
                ds = ds.max(d);
            }
            let mut idents = rep.identities.clone();
            idents.push(("f_parallel_iff".into(), equivalence(pf, df, tol)));
            idents.push(("s_parallel_iff".into(), equivalence(ps, ds, tol)));
            let out = CheckReport::from_residuals(name, tol, rep.points, idents);
            Ok(out.with_note(format!("max|∇f| = {pf:.3e}, max|∇*f*| = {df:.3e}, max|Ds| = {ps:.3e}, max|D*s*| = {ds:.3e}")))
        }
        "eq_o_submanifold" => eq_o_submanifold(ctx, name, &igs, tol),
        _ => Err(Error::UnknownCheck(name.to_string())),
    }
}

fn mean_shape(ig: &InducedGeometryAt) -> crate::tensor::Arr<f64> {
    crate::tensor::Arr::from_fn(ig.primal.shape.shape(), |i| 0.5 * (ig.primal.shape.get(i) + ig.dual.shape.get(i)))
}

fn umbilical(ctx: &Ctx, name: &str, igs: &[&InducedGeometryAt]) -> Result<CheckReport> {
    let rep = ctx.pointwise(name, igs, |ig| {
        let dev = ids::umbilicity(&mean_shape(ig)).iter().fold(0.0, |a, u| nan_max(a, u.1));
        Ok(vec![("umbilicity_mean", dev)])
    })?;
    let range = |shape: fn(&InducedGeometryAt) -> crate::tensor::Arr<f64>| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut dev: f64 = 0.0;
        for ig in igs {
            for (rho, d, _) in ids::umbilicity(&shape(ig)) {
                lo = lo.min(rho.abs());
                hi = hi.max(rho.abs());
                dev = dev.max(d);
            }
        }
        format!("|ρ| in [{lo:.9}, {hi:.9}], deviation {dev:.3e}")
    };
    Ok(rep.with_note(format!(
        "∇°: {}; ∇: {}; ∇*: {}",
        range(mean_shape),
        range(|ig| ig.primal.shape.clone()),
        range(|ig| ig.dual.shape.clone())
    )))
}

fn invariance(ctx: &Ctx, name: &str, igs: &[&InducedGeometryAt], tol: f64) -> Result<CheckReport> {
    let (mut p, mut d) = ([0.0f64; 4], [0.0f64; 4]);
    for ig in igs {
        let (a, b) = ids::block_sizes(ig).expect("structure");
        for i in 0..4 {
            p[i] = p[i].max(a[i]);
            d[i] = d[i].max(b[i]);
        }
    }
    // blocks are ordered f, h, t, s
    let mut idents: Vec<(String, f64)> = vec![
        ("h_iff_t_star".into(), equivalence(p[1], d[2], tol)),
        ("f_iff_f_star".into(), equivalence(p[0], d[0], tol)),
        ("s_iff_s_star".into(), equivalence(p[3], d[3], tol)),
        ("t_iff_h_star".into(), equivalence(p[2], d[1], tol)),
    ];
    let class = InvarianceClass::classify(p[1], p[0], tol);
    let mut points = Vec::new();
    if class.verdict == Invariance::FInvariant {
        // the induced (f, g) must itself be almost product-like
        let per: Vec<f64> = igs
            .par_iter()
            .map(|ig| {
                let f = &ig.primal.blocks.as_ref().expect("structure").f;
                let fs = &ig.dual.blocks.as_ref().expect("structure").f;
                let g = &ig.values.metric;
                let m = g.shape()[0];
                let id = identity(m);
                let ff = crate::linalg::matmul(f, f).max_abs_diff(&id);
                let mut compat: f64 = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        let mut acc = -g[[a, b]];
                        for c in 0..m {
                            for e in 0..m {
                                acc += f[[c, a]] * g[[c, e]] * fs[[e, b]];
                            }
                        }
                        compat = compat.max(acc.abs());
                    }
                }
                nan_max(ff, compat)
            })
            .collect();
        idents.push(("induced_almost_product_like".into(), per.iter().copied().fold(0.0, nan_max)));
        points = per.iter().enumerate().map(|(i, r)| ctx.record(i, *r)).collect();
    }
    let label = match class.verdict {
        Invariance::FInvariant => "F-invariant",
        Invariance::FAntiInvariant => "F-anti-invariant",
        Invariance::Mixed => "mixed",
    };
    Ok(CheckReport::from_residuals(name, tol, points, idents).with_note(format!(
        "{label}: max|f| = {:.3e}, max|h| = {:.3e}, max|t| = {:.3e}, max|s| = {:.3e}",
        p[0], p[1], p[2], p[3]
    )))
}

/// Largest ambient model residual over the sampled points, or None without F.
fn ambient_model_residual(ctx: &Ctx, c: f64) -> f64 {
    ctx.pts
        .par_iter()
        .map(|p| ambient::eq_o(&p.ambient, c).map(|n| named_max(&n)).unwrap_or(f64::NAN))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, nan_max)
}

fn model_precondition(ctx: &Ctx, name: &str) -> std::result::Result<f64, CheckReport> {
    let Some((c, _)) = ctx.model_c() else {
        return Err(ctx.skip(name, NO_STRUCTURE));
    };
    let r = ambient_model_residual(ctx, c);
    let tol = ctx.tolerance("eq_o");
    if !(r < tol) {
        return Err(ctx.skip(name, format!("ambient curvature misses the product-curvature model with c = {c}: residual {r:.3e}")));
    }
    Ok(c)
}

fn eq_o_submanifold(ctx: &Ctx, name: &str, igs: &[&InducedGeometryAt], tol: f64) -> Result<CheckReport> {
    let c = match model_precondition(ctx, name) {
        Ok(c) => c,
        Err(rep) => return Ok(rep),
    };
    let rep = ctx.pointwise(name, igs, |ig| Ok(ids::eq_o_submanifold_residuals(ig, c)))?;
    let dsigma = igs.iter().map(|ig| ig.primal.d_sigma.max_abs()).fold(0.0, nan_max);
    if !(dsigma < tol) {
        return Ok(rep.with_note(format!("σ is not D-parallel (max|Dσ| = {dsigma:.3e}); no branch asserted")));
    }
    let (mut mf, mut mh) = (0.0f64, 0.0f64);
    for ig in igs {
        let (a, _) = ids::block_sizes(ig).expect("structure");
        mf = mf.max(a[0]);
        mh = mh.max(a[1]);
    }
    let mut idents = rep.identities.clone();
    let note;
    if c.abs() < FLAT_C {
        note = "Dσ = 0: branch c = 0".to_string();
    } else if mh < tol {
        note = format!("Dσ = 0: branch F-invariant (max|h| = {mh:.3e})");
    } else if mf < tol {
        let sigma = igs.iter().map(|ig| ig.primal.sigma.max_abs()).fold(0.0, nan_max);
        if sigma < tol {
            let cc = igs
                .iter()
                .map(|ig| ids::induced_constant_curvature_residual(ig, c))
                .fold(0.0, nan_max);
            idents.push(("induced_constant_curvature".into(), cc));
            note = format!("Dσ = 0: branch F-anti-invariant (max|f| = {mf:.3e}); totally geodesic, induced curvature residual {cc:.3e}");
        } else {
            note = format!("Dσ = 0: branch F-anti-invariant (max|f| = {mf:.3e})");
        }
    } else {
        let out = CheckReport::from_residuals(name, tol, rep.points, idents);
        return Ok(out.failed(format!(
            "Dσ = 0 but c = {c}, max|h| = {mh:.3e}, max|f| = {mf:.3e}: no branch holds"
        )));
    }
    Ok(CheckReport::from_residuals(name, tol, rep.points, idents).with_note(note))
}

fn hypersurface_check(ctx: &Ctx, name: &str) -> Result<CheckReport> {
    let Some(imm) = &ctx.doc.immersion else {
        return Ok(ctx.skip(name, "scenario has no immersion"));
    };
    let k = ctx.doc.geom.dim() - imm.dim();
    if k != 1 {
        return Ok(ctx.skip(name, format!("codimension is {k}, not 1")));
    }
    if name != "kappa" && ctx.doc.geom.structure.is_none() {
        return Ok(ctx.skip(name, NO_STRUCTURE));
    }
    let hs = ctx.hypersurfaces().expect("immersion present")?;
    match name {
        "xi_mu" => return ctx.pointwise(name, hs, hyp::xi_mu_residuals),
        "kappa" => return ctx.pointwise(name, hs, |h| Ok(hyp::kappa_residuals(h))),
        _ => {}
    }
    let mus: Vec<f64> = hs.iter().map(|h| h.xi().map(|x| x.mu.abs())).collect::<Result<_>>()?;
    if name == "tangential" {
        return ctx.pointwise(name, hs, |h| {
            let mu = h.xi()?.mu.abs();
            let s = h.ig.primal.blocks.as_ref().map_or(f64::NAN, |b| b.s.max_abs());
            let ss = h.ig.dual.blocks.as_ref().map_or(f64::NAN, |b| b.s.max_abs());
            Ok(vec![("mu", mu), ("s", s), ("s_star", ss)])
        });
    }
    let tol_t = ctx.tolerance("tangential");
    let (wi, wv) = ctx.worst_point(&mus);
    if !(wv < tol_t) {
        let mut reason = format!("not tangential: |μ| = {wv:.3e} at {}", ctx.fmt_point(wi));
        if wv < NON_TANGENTIAL_MU {
            reason.push_str(" (warning: nearly tangential, suite not run)");
        }
        return Ok(ctx.skip(name, reason));
    }
    if matches!(name, "prop5a" | "prop8a" | "curvature_xi") && !ctx.f_parallel() {
        return Ok(ctx.skip(name, "ambient F is not parallel"));
    }
    match name {
        "phi_eta" => ctx.pointwise(name, hs, hyp::phi_eta_residuals),
        "prop5a" => ctx.pointwise(name, hs, hyp::prop5a_residuals),
        "prop8a" => ctx.pointwise(name, hs, hyp::prop8a_residuals),
        "curvature_xi" => ctx.pointwise(name, hs, hyp::curvature_xi_residuals),
        "para_contact_like" => ctx.pointwise(name, hs, hyp::para_contact_residuals),
        "tk_identities" => tk_identities(ctx, name, hs),
        _ => Err(Error::UnknownCheck(name.to_string())),
    }
}

fn tk_identities(ctx: &Ctx, name: &str, hs: &[HypersurfaceAt]) -> Result<CheckReport> {
    let c = match model_precondition(ctx, name) {
        Ok(c) => c,
        Err(rep) => return Ok(rep),
    };
    let tol = ctx.tolerance(name);
    let phi_z: Vec<f64> = hs.par_iter().map(|h| hyp::tk_residuals(h, c).map(|r| r.1)).collect::<Result<_>>()?;
    let rep = ctx.pointwise(name, hs, |h| Ok(hyp::tk_residuals(h, c)?.0))?;
    let sigma = hs.iter().map(hyp::sigma_n_max).fold(0.0, nan_max);
    let phi_z_max = phi_z.into_iter().fold(0.0, nan_max);
    let mut idents = rep.identities.clone();
    let note_phi_z = format!("first identity with R applied to φZ: residual {phi_z_max:.3e}");
    if sigma < tol {
        idents.push(("flatness".into(), if c.abs() < FLAT_C { 0.0 } else { c.abs() }));
        let out = CheckReport::from_residuals(name, tol, rep.points, idents);
        let diag = if c.abs() < FLAT_C {
            "'σ = 0 and c = 0: flat, as required".to_string()
        } else {
            format!("flatness diagnosis: 'σ = 0 (max {sigma:.3e}) but c = {c}")
        };
        return Ok(out.with_note(diag).with_note(note_phi_z));
    }
    Ok(CheckReport::from_residuals(name, tol, rep.points, idents).with_note(note_phi_z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_names_are_unique() {
        for (i, c) in CATALOG.iter().enumerate() {
            assert!(CATALOG[..i].iter().all(|d| d.name != c.name), "{}", c.name);
            assert!(!c.description.is_empty() && !c.anchor.is_empty());
        }
        assert!(lookup("lemma7").is_some());
        assert!(lookup("nope").is_none());
    }

    #[test]
    fn equivalence_flags_only_mismatches() {
        assert_eq!(equivalence(0.0, 0.0, 1e-8), 0.0);
        assert_eq!(equivalence(1.0, 2.0, 1e-8), 0.0);
        assert_eq!(equivalence(0.0, 2.0, 1e-8), 2.0);
    }
}
