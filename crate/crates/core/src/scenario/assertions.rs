//! Expected-value assertions.
//!
//! A target names one scalar: `name[arg, ...].component`. Arguments and
//! components are coordinate names. Tangent slots take domain coordinates,
//! ambient slots take ambient coordinates, and normal slots take either
//! `n:<coord>` (the ambient coordinate field ∂_coord along M, which must be
//! normal there) or `N` (the unit normal of a hypersurface). Normal results
//! are read off in the basis of the coordinate fields that are normal at the
//! point, or as the N coefficient.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, ExprTree};
use crate::geometry::{AmbientJets, ChartGeometry, ConnectionKind};
use crate::hypersurface::HypersurfaceAt;
use crate::submanifold::identities::View;
use crate::submanifold::{Immersion, InducedGeometryAt, SubmanifoldJets};

use super::AssertionFile;

/// Check-name prefix of assertion checks.
pub const PREFIX: &str = "assert:";

/// Tangential g̃-length below which a coordinate field counts as normal.
pub const COORD_NORMAL_TOL: f64 = 1.0e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Ambient,
    Tangent,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Out {
    Scalar,
    Ambient,
    Tangent,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Needs {
    Nothing,
    Structure,
    Immersion,
    ImmersionStructure,
    Hypersurface,
    HypersurfaceStructure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    AmbientMetric,
    AmbientF,
    FStar,
    AmbientNabla,
    AmbientNablaStar,
    Metric,
    Nabla,
    NablaStar,
    Sigma,
    SigmaStar,
    A,
    AStar,
    D,
    DStar,
    F,
    H,
    T,
    S,
    FS,
    HS,
    TS,
    SS,
    Kappa,
    KappaStar,
    Xi,
    XiStar,
    Mu,
    MuStar,
    Eta,
    EtaStar,
    Phi,
    PhiStar,
    AN,
    ANStar,
    NablaXi,
    NablaXiStar,
    NablaPhi,
    NablaPhiStar,
}

use Needs as Nd;
use Out as O;
use Quantity as Q;
use Slot::{Ambient as SA, Normal as SN, Tangent as ST};

const TABLE: &[(&str, Quantity, &[Slot], Out, Needs)] = &[
    ("ambient.metric", Q::AmbientMetric, &[SA, SA], O::Scalar, Nd::Nothing),
    ("ambient.F", Q::AmbientF, &[SA], O::Ambient, Nd::Structure),
    ("F_star", Q::FStar, &[SA], O::Ambient, Nd::Structure),
    ("ambient.nabla", Q::AmbientNabla, &[SA, SA], O::Ambient, Nd::Nothing),
    ("ambient.nabla_star", Q::AmbientNablaStar, &[SA, SA], O::Ambient, Nd::Nothing),
    ("metric", Q::Metric, &[ST, ST], O::Scalar, Nd::Immersion),
    ("nabla", Q::Nabla, &[ST, ST], O::Tangent, Nd::Immersion),
    ("nabla_star", Q::NablaStar, &[ST, ST], O::Tangent, Nd::Immersion),
    ("sigma", Q::Sigma, &[ST, ST], O::Normal, Nd::Immersion),
    ("sigma_star", Q::SigmaStar, &[ST, ST], O::Normal, Nd::Immersion),
    ("A", Q::A, &[SN, ST], O::Tangent, Nd::Immersion),
    ("A_star", Q::AStar, &[SN, ST], O::Tangent, Nd::Immersion),
    ("D", Q::D, &[ST, SN], O::Normal, Nd::Immersion),
    ("D_star", Q::DStar, &[ST, SN], O::Normal, Nd::Immersion),
    ("f", Q::F, &[ST], O::Tangent, Nd::ImmersionStructure),
    ("h", Q::H, &[ST], O::Normal, Nd::ImmersionStructure),
    ("t", Q::T, &[SN], O::Tangent, Nd::ImmersionStructure),
    ("s", Q::S, &[SN], O::Normal, Nd::ImmersionStructure),
    ("f_star", Q::FS, &[ST], O::Tangent, Nd::ImmersionStructure),
    ("h_star", Q::HS, &[ST], O::Normal, Nd::ImmersionStructure),
    ("t_star", Q::TS, &[SN], O::Tangent, Nd::ImmersionStructure),
    ("s_star", Q::SS, &[SN], O::Normal, Nd::ImmersionStructure),
    ("kappa", Q::Kappa, &[ST], O::Scalar, Nd::Hypersurface),
    ("kappa_star", Q::KappaStar, &[ST], O::Scalar, Nd::Hypersurface),
    ("xi", Q::Xi, &[], O::Tangent, Nd::HypersurfaceStructure),
    ("xi_star", Q::XiStar, &[], O::Tangent, Nd::HypersurfaceStructure),
    ("mu", Q::Mu, &[], O::Scalar, Nd::HypersurfaceStructure),
    ("mu_star", Q::MuStar, &[], O::Scalar, Nd::HypersurfaceStructure),
    ("eta", Q::Eta, &[ST], O::Scalar, Nd::HypersurfaceStructure),
    ("eta_star", Q::EtaStar, &[ST], O::Scalar, Nd::HypersurfaceStructure),
    ("phi", Q::Phi, &[ST], O::Tangent, Nd::HypersurfaceStructure),
    ("phi_star", Q::PhiStar, &[ST], O::Tangent, Nd::HypersurfaceStructure),
    ("A_N", Q::AN, &[ST], O::Tangent, Nd::Hypersurface),
    ("A_N_star", Q::ANStar, &[ST], O::Tangent, Nd::Hypersurface),
    ("nabla_xi", Q::NablaXi, &[ST], O::Tangent, Nd::HypersurfaceStructure),
    ("nabla_xi_star", Q::NablaXiStar, &[ST], O::Tangent, Nd::HypersurfaceStructure),
    ("nabla_phi", Q::NablaPhi, &[ST, ST], O::Tangent, Nd::HypersurfaceStructure),
    ("nabla_phi_star", Q::NablaPhiStar, &[ST, ST], O::Tangent, Nd::HypersurfaceStructure),
];

/// Target names accepted in assertions.
pub fn target_names() -> Vec<&'static str> {
    TABLE.iter().map(|t| t.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arg {
    /// Coordinate index in the slot's coordinate list.
    Coord(usize),
    /// Ambient coordinate field along M.
    CoordNormal(usize),
    UnitNormal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub text: String,
    pub quantity: Quantity,
    pub args: Vec<Arg>,
    pub component: Option<Arg>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub target: Target,
    pub expr: ExprTree,
    pub tolerance: Option<f64>,
}

impl Assertion {
    pub fn check_name(&self) -> String {
        format!("{PREFIX}{}", self.name)
    }

    pub(crate) fn parse(
        a: &AssertionFile,
        ambient_coords: &[String],
        imm: Option<&Immersion>,
        sample_coords: &[String],
        index: usize,
    ) -> Result<Assertion> {
        let path = format!("assertions[{index}]");
        if a.name.is_empty() || a.name.chars().any(char::is_whitespace) {
            return Err(Error::Schema {
                path: format!("{path}.name"),
                message: "assertion names must be non-empty without whitespace".into(),
            });
        }
        let target = Target::parse(&a.target, ambient_coords, imm).map_err(|message| Error::Schema {
            path: format!("{path}.target"),
            message,
        })?;
        let expr = parse_expr(&a.expr, sample_coords).map_err(|e| Error::Schema {
            path: format!("{path}.expr"),
            message: e.to_string(),
        })?;
        if let Some(t) = a.tolerance {
            if !(t > 0.0) {
                return Err(Error::Schema {
                    path: format!("{path}.tolerance"),
                    message: "tolerance must be positive".into(),
                });
            }
        }
        Ok(Assertion {
            name: a.name.clone(),
            target,
            expr,
            tolerance: a.tolerance,
        })
    }

    /// |target − expr| at a sample point.
    pub fn residual(&self, pd: &PointData) -> Result<f64> {
        let got = self.target.eval(pd)?;
        let want = self.expr.eval_value(&pd.u)?;
        Ok((got - want).abs())
    }
}

fn coord_index(name: &str, coords: &[String]) -> Option<usize> {
    coords.iter().position(|c| c == name)
}

fn parse_slot(s: &str, slot: Slot, ambient: &[String], domain: &[String], k: Option<usize>) -> std::result::Result<Arg, String> {
    let s = s.trim();
    match slot {
        Slot::Ambient => coord_index(s, ambient)
            .map(Arg::Coord)
            .ok_or_else(|| format!("`{s}` is not an ambient coordinate")),
        Slot::Tangent => coord_index(s, domain)
            .map(Arg::Coord)
            .ok_or_else(|| format!("`{s}` is not a domain coordinate")),
        Slot::Normal => {
            if s == "N" {
                if k == Some(1) {
                    Ok(Arg::UnitNormal)
                } else {
                    Err("`N` needs a hypersurface".into())
                }
            } else if let Some(c) = s.strip_prefix("n:") {
                coord_index(c.trim(), ambient)
                    .map(Arg::CoordNormal)
                    .ok_or_else(|| format!("`{c}` is not an ambient coordinate"))
            } else {
                Err(format!("normal slot needs `n:<coord>` or `N`, found `{s}`"))
            }
        }
    }
}

impl Target {
    pub fn parse(text: &str, ambient: &[String], imm: Option<&Immersion>) -> std::result::Result<Target, String> {
        let text = text.trim();
        let entry = TABLE
            .iter()
            .filter(|e| {
                text.starts_with(e.0)
                    && matches!(text[e.0.len()..].chars().next(), None | Some('[') | Some('.'))
            })
            .max_by_key(|e| e.0.len())
            .ok_or_else(|| format!("unknown target `{text}`; known targets: {}", target_names().join(", ")))?;
        let (name, quantity, slots, out, needs) = *entry;
        let mut rest = &text[name.len()..];
        let empty: Vec<String> = Vec::new();
        let domain = imm.map(|i| &i.coords[..]).unwrap_or(&empty[..]);
        let k = imm.map(|i| ambient.len().saturating_sub(i.dim()));
        match needs {
            Nd::Immersion | Nd::ImmersionStructure if imm.is_none() => {
                return Err(format!("`{name}` needs an immersion"))
            }
            Nd::Hypersurface | Nd::HypersurfaceStructure if k != Some(1) => {
                return Err(format!("`{name}` needs a hypersurface (codimension 1)"))
            }
            _ => {}
        }
        let mut args = Vec::new();
        if let Some(r) = rest.strip_prefix('[') {
            let close = r.find(']').ok_or_else(|| format!("missing `]` in `{text}`"))?;
            let inner = &r[..close];
            rest = &r[close + 1..];
            let parts: Vec<&str> = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').collect() };
            if parts.len() != slots.len() {
                return Err(format!("`{name}` takes {} arguments, found {}", slots.len(), parts.len()));
            }
            for (p, &slot) in parts.iter().zip(slots) {
                args.push(parse_slot(p, slot, ambient, domain, k)?);
            }
        } else if !slots.is_empty() {
            return Err(format!("`{name}` takes {} arguments", slots.len()));
        }
        let component = match rest.strip_prefix('.') {
            None if rest.is_empty() => None,
            None => return Err(format!("unexpected `{rest}` in `{text}`")),
            Some(c) => Some(match out {
                O::Scalar => return Err(format!("`{name}` is a scalar and takes no component")),
                O::Ambient => parse_slot(c, Slot::Ambient, ambient, domain, k)?,
                O::Tangent => parse_slot(c, Slot::Tangent, ambient, domain, k)?,
                O::Normal => parse_slot(c, Slot::Normal, ambient, domain, k)?,
            }),
        };
        if out != O::Scalar && component.is_none() {
            return Err(format!("`{name}` is a vector; select a component with `.<coord>`"));
        }
        Ok(Target {
            text: text.to_string(),
            quantity,
            args,
            component,
        })
    }

    fn needs_structure(&self) -> bool {
        TABLE
            .iter()
            .find(|e| e.1 == self.quantity)
            .is_some_and(|e| matches!(e.4, Nd::Structure | Nd::ImmersionStructure | Nd::HypersurfaceStructure))
    }

    pub fn eval(&self, pd: &PointData) -> Result<f64> {
        if self.needs_structure() && pd.ambient.f.is_none() {
            return Err(Error::Dimension {
                field: "structure.F".into(),
                message: format!("target `{}` needs an ambient structure", self.text),
            });
        }
        let amb = &pd.ambient;
        let a = &self.args;
        let coord = |i: usize| match a[i] {
            Arg::Coord(c) => c,
            _ => unreachable!("slot kinds are checked at parse time"),
        };
        let comp_amb = |v: Vec<f64>| match self.component {
            Some(Arg::Coord(c)) => v[c],
            _ => unreachable!(),
        };
        match self.quantity {
            Q::AmbientMetric => return Ok(amb.metric()[[coord(0), coord(1)]]),
            Q::AmbientF => {
                let f = amb.structure_values().expect("checked");
                let j = coord(0);
                return Ok(comp_amb((0..amb.dim()).map(|i| f[[i, j]]).collect()));
            }
            Q::FStar => {
                let f = amb.conjugate_values().expect("checked");
                let j = coord(0);
                return Ok(comp_amb((0..amb.dim()).map(|i| f[[i, j]]).collect()));
            }
            Q::AmbientNabla | Q::AmbientNablaStar => {
                let kind = if self.quantity == Q::AmbientNabla { ConnectionKind::Primal } else { ConnectionKind::Dual };
                let g = amb.connection(kind).gamma;
                let (i, j) = (coord(0), coord(1));
                return Ok(comp_amb((0..amb.dim()).map(|l| g[[l, i, j]]).collect()));
            }
            _ => {}
        }
        let (jets, ig) = match (&pd.jets, &pd.ig) {
            (Some(j), Some(ig)) => (j, ig),
            _ => {
                return Err(Error::Dimension {
                    field: "immersion".into(),
                    message: format!("target `{}` needs an immersion", self.text),
                })
            }
        };
        let fv = &ig.values;
        let (m, k) = (fv.m(), fv.k());
        let basis = |i: usize| fv.basis(coord(i));
        let normal_arg = |i: usize| -> Result<Vec<f64>> {
            match a[i] {
                Arg::UnitNormal => Ok(fv.nbasis(0)),
                Arg::CoordNormal(c) => coordinate_normal_values(jets, c, &pd.u),
                Arg::Coord(_) => unreachable!(),
            }
        };
        let p = View::new(&ig.primal, fv);
        let d = View::new(&ig.dual, fv);
        let tangent = |v: Vec<f64>| -> Result<f64> {
            match self.component {
                Some(Arg::Coord(c)) => Ok(v[c]),
                _ => unreachable!(),
            }
        };
        let normal = |w: Vec<f64>| -> Result<f64> {
            match self.component {
                Some(Arg::UnitNormal) => Ok(w[0]),
                Some(Arg::CoordNormal(c)) => coordinate_normal_component(jets, &w, c, &pd.u),
                _ => unreachable!(),
            }
        };
        let hs = || HypersurfaceAt::new(ig.clone());
        match self.quantity {
            Q::Metric => Ok(fv.metric[[coord(0), coord(1)]]),
            Q::Nabla | Q::NablaStar => {
                let fam = if self.quantity == Q::Nabla { &ig.primal } else { &ig.dual };
                let (x, y) = (coord(0), coord(1));
                tangent((0..m).map(|c| fam.gamma[[c, x, y]]).collect())
            }
            Q::Sigma => normal(p.sigma(&basis(0), &basis(1))),
            Q::SigmaStar => normal(d.sigma(&basis(0), &basis(1))),
            Q::A => tangent(p.shape(&normal_arg(0)?, &basis(1))),
            Q::AStar => tangent(d.shape(&normal_arg(0)?, &basis(1))),
            Q::D | Q::DStar => {
                let fam = if self.quantity == Q::D { &ig.primal } else { &ig.dual };
                let x = coord(0);
                // D_X V = Σ_β (X v_β + Σ_α D[x, β, α] v_α) V_β
                let (vals, grads) = match a[1] {
                    Arg::UnitNormal => (fv.nbasis(0), vec![vec![0.0; m]; k]),
                    Arg::CoordNormal(c) => {
                        let (comps, tl) = jets.coordinate_normal(c);
                        require_normal(tl, c, &pd.u)?;
                        (comps.iter().map(|t| t.value()).collect(), comps.iter().map(|t| t.gradient()).collect())
                    }
                    Arg::Coord(_) => unreachable!(),
                };
                let w = (0..k)
                    .map(|b| grads[b][x] + (0..k).map(|al| fam.normal_conn[[x, b, al]] * vals[al]).sum::<f64>())
                    .collect();
                normal(w)
            }
            Q::F => tangent(p.f(&basis(0))),
            Q::H => normal(p.h(&basis(0))),
            Q::T => tangent(p.t(&normal_arg(0)?)),
            Q::S => normal(p.s(&normal_arg(0)?)),
            Q::FS => tangent(d.f(&basis(0))),
            Q::HS => normal(d.h(&basis(0))),
            Q::TS => tangent(d.t(&normal_arg(0)?)),
            Q::SS => normal(d.s(&normal_arg(0)?)),
            Q::Kappa => Ok(hs()?.kappa().kappa[coord(0)]),
            Q::KappaStar => Ok(hs()?.kappa().kappa_star[coord(0)]),
            Q::Xi => tangent(hs()?.xi()?.xi),
            Q::XiStar => tangent(hs()?.xi()?.xi_star),
            Q::Mu => Ok(hs()?.xi()?.mu),
            Q::MuStar => Ok(hs()?.xi()?.mu_star),
            Q::Eta => Ok(hs()?.phi_eta()?.eta[coord(0)]),
            Q::EtaStar => Ok(hs()?.phi_eta()?.eta_star[coord(0)]),
            Q::Phi => tangent(p.f(&basis(0))),
            Q::PhiStar => tangent(d.f(&basis(0))),
            Q::AN => tangent(hs()?.a_n(&basis(0))),
            Q::ANStar => tangent(hs()?.a_n_star(&basis(0))),
            Q::NablaXi => tangent(hs()?.nabla_xi(&basis(0))),
            Q::NablaXiStar => tangent(hs()?.nabla_xi_star(&basis(0))),
            Q::NablaPhi => tangent(hs()?.nabla_phi(&basis(0), &basis(1))),
            Q::NablaPhiStar => tangent(hs()?.nabla_phi_star(&basis(0), &basis(1))),
            Q::AmbientMetric | Q::AmbientF | Q::FStar | Q::AmbientNabla | Q::AmbientNablaStar => unreachable!(),
        }
    }
}

fn require_normal(tangential: f64, coord: usize, u: &[f64]) -> Result<()> {
    if tangential > COORD_NORMAL_TOL {
        return Err(Error::Dimension {
            field: "assertion".into(),
            message: format!(
                "ambient coordinate field {} is not normal at {u:?} (tangential length {tangential:e})",
                coord + 1
            ),
        });
    }
    Ok(())
}

fn coordinate_normal_values(jets: &SubmanifoldJets, coord: usize, u: &[f64]) -> Result<Vec<f64>> {
    let (comps, tl) = jets.coordinate_normal(coord);
    require_normal(tl, coord, u)?;
    Ok(comps.iter().map(|t| t.value()).collect())
}

/// Coefficient of ∂_coord when the normal vector `w` (orthonormal-frame
/// components) is written in the coordinate fields that are normal here.
fn coordinate_normal_component(jets: &SubmanifoldJets, w: &[f64], coord: usize, u: &[f64]) -> Result<f64> {
    let n = jets.x.len();
    let k = jets.codim();
    let mut cols = Vec::new();
    let mut which = None;
    for c in 0..n {
        let (comps, tl) = jets.coordinate_normal(c);
        if tl <= COORD_NORMAL_TOL {
            if c == coord {
                which = Some(cols.len());
            }
            cols.push(comps.iter().map(|t| t.value()).collect::<Vec<f64>>());
        }
    }
    let Some(pos) = which else {
        let (_, tl) = jets.coordinate_normal(coord);
        require_normal(tl, coord, u)?;
        unreachable!("a coordinate field passing the normal test is collected above");
    };
    if cols.len() != k {
        return Err(Error::Dimension {
            field: "assertion".into(),
            message: format!("only {} of {k} normal directions are coordinate fields at {u:?}", cols.len()),
        });
    }
    let mat = DMatrix::from_fn(k, k, |r, c| cols[c][r]);
    let sol = mat
        .lu()
        .solve(&DVector::from_column_slice(w))
        .ok_or_else(|| Error::NormalFrame { point: u.to_vec() })?;
    Ok(sol[pos])
}

/// Everything evaluated at one sample point.
#[derive(Debug, Clone)]
pub struct PointData {
    /// Sample point (domain coordinates when there is an immersion).
    pub u: Vec<f64>,
    /// Ambient point.
    pub x: Vec<f64>,
    pub ambient: AmbientJets,
    pub jets: Option<SubmanifoldJets>,
    pub ig: Option<InducedGeometryAt>,
}

impl PointData {
    pub fn compute(geom: &ChartGeometry, imm: Option<&Immersion>, u: &[f64]) -> Result<PointData> {
        match imm {
            None => Ok(PointData {
                u: u.to_vec(),
                x: u.to_vec(),
                ambient: AmbientJets::at(geom, u)?,
                jets: None,
                ig: None,
            }),
            Some(imm) => {
                let jets = SubmanifoldJets::compute(geom, imm, u)?;
                let ig = InducedGeometryAt::from_jets(&jets);
                Ok(PointData {
                    u: u.to_vec(),
                    x: jets.x.clone(),
                    ambient: jets.ambient.clone(),
                    jets: Some(jets),
                    ig: Some(ig),
                })
            }
        }
    }

    pub fn hypersurface(&self) -> Option<Result<HypersurfaceAt>> {
        self.ig.as_ref().map(|ig| HypersurfaceAt::new(ig.clone()))
    }
}
