//! Immersed submanifolds: frames, induced connections, second fundamental
//! forms, shape operators, normal connections and the f/h/t/s blocks.
//!
//! Everything along the submanifold is a Taylor field in the domain
//! coordinates. The immersion map is expanded to order 3, the ambient metric
//! and normal frame to order 2, and all derived objects to order 1, which is
//! what their covariant derivatives and curvatures need. Tangent vectors are
//! stored as components on the coordinate frame `e_a = ∂x/∂u^a`, normal vectors
//! as components on the orthonormal normal frame.

pub mod identities;

use crate::error::{Error, Result};
use crate::expr::ExprTree;
use crate::geometry::{riemann_from_field, AmbientJets, ChartGeometry, ConnectionKind};
use crate::linalg::{singular_values, tinverse};
use crate::taylor::Taylor;
use crate::tensor::Arr;

/// Smallest admissible singular value of the Jacobian.
pub const RANK_TOL: f64 = 1.0e-8;
/// Admissible g̃-pairing between a declared normal and the tangent frame.
pub const NORMAL_ORTHOGONALITY_TOL: f64 = 1.0e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Immersion {
    pub coords: Vec<String>,
    pub bounds: Vec<(f64, f64)>,
    pub map: Vec<ExprTree>,
    /// Declared normal fields, each with one expression per ambient coordinate.
    pub normals: Option<Vec<Vec<ExprTree>>>,
}

impl Immersion {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameAt {
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    /// Jacobian columns as ambient vectors.
    pub tangent: Vec<Vec<f64>>,
    /// g̃-orthonormal normal vectors.
    pub normal: Vec<Vec<f64>>,
}

/// Order-1 fields of one connection family along the submanifold.
#[derive(Debug, Clone)]
pub struct FamilyJets {
    /// `[[c, a, b]]`
    pub gamma: Arr<Taylor>,
    /// `[[α, a, b]]`
    pub sigma: Arr<Taylor>,
    /// `[[α, c, b]]`: A_α e_b = Σ_c shape[α, c, b] e_c
    pub shape: Arr<Taylor>,
    /// `[[a, β, α]]`: D_a V_α = Σ_β normal_conn[a, β, α] V_β
    pub normal_conn: Arr<Taylor>,
}

/// Tangential/normal blocks of a (1,1) tensor along the submanifold.
#[derive(Debug, Clone)]
pub struct BlockJets {
    /// `[[c, b]]`
    pub f: Arr<Taylor>,
    /// `[[β, b]]`
    pub h: Arr<Taylor>,
    /// `[[c, α]]`
    pub t: Arr<Taylor>,
    /// `[[β, α]]`
    pub s: Arr<Taylor>,
}

/// All Taylor data of an immersion at one domain point.
#[derive(Debug, Clone)]
pub struct SubmanifoldJets {
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    pub ambient: AmbientJets,
    /// Ambient metric along M, order 2, `[[i, j]]`.
    pub metric2: Arr<Taylor>,
    /// Jacobian, order 2, `[[i, a]]`.
    pub jac2: Arr<Taylor>,
    /// Orthonormal normal frame, order 2, `[[α, i]]`.
    pub normals2: Arr<Taylor>,
    /// Induced metric and inverse, order 1.
    pub gind: Arr<Taylor>,
    pub gind_inv: Arr<Taylor>,
    pub primal: FamilyJets,
    pub dual: FamilyJets,
    pub f_blocks: Option<BlockJets>,
    pub f_star_blocks: Option<BlockJets>,
}

fn inner(g: &Arr<Taylor>, v: &[Taylor], w: &[Taylor]) -> Taylor {
    let n = v.len();
    let mut acc = v[0].zero_like();
    for i in 0..n {
        for j in 0..n {
            acc += g[[i, j]].mul_ref(&v[i]).mul_ref(&w[j]);
        }
    }
    acc
}

struct Projector<'a> {
    jac: &'a Arr<Taylor>,
    gj: Arr<Taylor>,
    ginv: Arr<Taylor>,
    gv: Arr<Taylor>,
}

impl Projector<'_> {
    fn tangent(&self, w: &[Taylor]) -> Vec<Taylor> {
        let (n, m) = (self.jac.shape()[0], self.jac.shape()[1]);
        let y: Vec<Taylor> = (0..m)
            .map(|b| {
                let mut acc = self.gj[[0, b]].mul_ref(&w[0]);
                for i in 1..n {
                    acc += self.gj[[i, b]].mul_ref(&w[i]);
                }
                acc
            })
            .collect();
        (0..m)
            .map(|c| {
                let mut acc = self.ginv[[c, 0]].mul_ref(&y[0]);
                for b in 1..m {
                    acc += self.ginv[[c, b]].mul_ref(&y[b]);
                }
                acc
            })
            .collect()
    }

    fn normal(&self, w: &[Taylor]) -> Vec<Taylor> {
        let (n, k) = (self.gv.shape()[0], self.gv.shape()[1]);
        (0..k)
            .map(|al| {
                let mut acc = self.gv[[0, al]].mul_ref(&w[0]);
                for i in 1..n {
                    acc += self.gv[[i, al]].mul_ref(&w[i]);
                }
                acc
            })
            .collect()
    }
}

fn gram_schmidt_declared(
    imm: &Immersion,
    uvars: &[Taylor],
    g2: &Arr<Taylor>,
    jac2: &Arr<Taylor>,
    u: &[f64],
) -> Result<Vec<Vec<Taylor>>> {
    let decl = imm.normals.as_ref().expect("declared normals");
    let (n, m) = (jac2.shape()[0], jac2.shape()[1]);
    let mut frame: Vec<Vec<Taylor>> = Vec::new();
    for (idx, comps) in decl.iter().enumerate() {
        let nv: Vec<Taylor> = comps
            .iter()
            .map(|t| t.eval(uvars).map(|x| x.truncate(2)))
            .collect::<Result<_>>()?;
        for a in 0..m {
            let col: Vec<Taylor> = (0..n).map(|i| jac2[[i, a]].clone()).collect();
            let r = inner(g2, &nv, &col).value().abs();
            if !(r <= NORMAL_ORTHOGONALITY_TOL) {
                return Err(Error::NormalNotOrthogonal {
                    index: idx,
                    point: u.to_vec(),
                    residual: r,
                });
            }
        }
        let mut v = nv.clone();
        for prev in &frame {
            let p = inner(g2, &nv, prev);
            for i in 0..n {
                v[i] -= p.mul_ref(&prev[i]);
            }
        }
        let norm2 = inner(g2, &v, &v);
        if !(norm2.value() > 0.0) {
            return Err(Error::NormalFrame { point: u.to_vec() });
        }
        let r = norm2.sqrt().recip();
        frame.push(v.iter().map(|x| x.mul_ref(&r)).collect());
    }
    Ok(frame)
}

fn gram_schmidt_derived(
    g2: &Arr<Taylor>,
    jac2: &Arr<Taylor>,
    k: usize,
    u: &[f64],
) -> Result<Vec<Vec<Taylor>>> {
    let (n, m) = (jac2.shape()[0], jac2.shape()[1]);
    let gj = crate::linalg::tmatmul(g2, jac2);
    let gind = crate::linalg::tmatmul(&crate::linalg::ttranspose(jac2), &gj);
    let ginv = tinverse(&gind).ok_or_else(|| Error::RankDeficient {
        point: u.to_vec(),
        singular: 0.0,
    })?;
    let proj = Projector {
        jac: jac2,
        gj,
        ginv,
        gv: Arr::filled(&[n, 0], g2[[0, 0]].clone()),
    };
    let zero = g2[[0, 0]].zero_like();
    let mut frame: Vec<Vec<Taylor>> = Vec::new();
    for cand in 0..n {
        if frame.len() == k {
            break;
        }
        let w: Vec<Taylor> = (0..n)
            .map(|i| if i == cand { zero.lift(1.0) } else { zero.clone() })
            .collect();
        let tc = proj.tangent(&w);
        let mut v = w.clone();
        for i in 0..n {
            for a in 0..m {
                v[i] -= jac2[[i, a]].mul_ref(&tc[a]);
            }
        }
        for prev in &frame {
            let p = inner(g2, &w, prev);
            for i in 0..n {
                v[i] -= p.mul_ref(&prev[i]);
            }
        }
        let norm2 = inner(g2, &v, &v);
        if !(norm2.value() > 1.0e-12 * g2[[cand, cand]].value()) {
            continue;
        }
        let r = norm2.sqrt().recip();
        let mut unit: Vec<Taylor> = v.iter().map(|x| x.mul_ref(&r)).collect();
        let first = unit.iter().map(|x| x.value()).find(|x| x.abs() > 1.0e-12);
        if matches!(first, Some(x) if x < 0.0) {
            unit = unit.iter().map(|x| -x).collect();
        }
        frame.push(unit);
    }
    if frame.len() < k {
        return Err(Error::NormalFrame { point: u.to_vec() });
    }
    Ok(frame)
}

fn compose_arr(a: &Arr<Taylor>, delta: &[Taylor]) -> Arr<Taylor> {
    a.map(|t| t.compose(delta))
}

fn family(
    gam: &Arr<Taylor>,
    jac1: &Arr<Taylor>,
    djac: &Arr<Taylor>,
    v1: &Arr<Taylor>,
    dv: &Arr<Taylor>,
    proj: &Projector<'_>,
) -> FamilyJets {
    let (n, m) = (jac1.shape()[0], jac1.shape()[1]);
    let k = v1.shape()[0];
    // Γ̃^i_{jl} X^j Y^l for ambient component lists X, Y
    let apply = |x: &dyn Fn(usize) -> Taylor, y: &dyn Fn(usize) -> Taylor| -> Vec<Taylor> {
        let xs: Vec<Taylor> = (0..n).map(x).collect();
        let ys: Vec<Taylor> = (0..n).map(y).collect();
        (0..n)
            .map(|i| {
                let mut acc = gam[[i, 0, 0]].zero_like();
                for j in 0..n {
                    let mut inner = gam[[i, j, 0]].mul_ref(&ys[0]);
                    for l in 1..n {
                        inner += gam[[i, j, l]].mul_ref(&ys[l]);
                    }
                    acc += xs[j].mul_ref(&inner);
                }
                acc
            })
            .collect()
    };
    let mut gamma = Arr::filled(&[m, m, m], gam[[0, 0, 0]].zero_like());
    let mut sigma = Arr::filled(&[k, m, m], gam[[0, 0, 0]].zero_like());
    for a in 0..m {
        for b in 0..m {
            let mut w = apply(&|j| jac1[[j, a]].clone(), &|l| jac1[[l, b]].clone());
            for (i, wi) in w.iter_mut().enumerate() {
                *wi += &djac[[i, b, a]];
            }
            for (c, v) in proj.tangent(&w).into_iter().enumerate() {
                gamma[[c, a, b]] = v;
            }
            for (al, v) in proj.normal(&w).into_iter().enumerate() {
                sigma[[al, a, b]] = v;
            }
        }
    }
    let mut shape = Arr::filled(&[k, m, m], gam[[0, 0, 0]].zero_like());
    let mut normal_conn = Arr::filled(&[m, k, k], gam[[0, 0, 0]].zero_like());
    for a in 0..m {
        for al in 0..k {
            let mut y = apply(&|j| jac1[[j, a]].clone(), &|l| v1[[al, l]].clone());
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += &dv[[al, i, a]];
            }
            for (c, v) in proj.tangent(&y).into_iter().enumerate() {
                shape[[al, c, a]] = -v;
            }
            for (be, v) in proj.normal(&y).into_iter().enumerate() {
                normal_conn[[a, be, al]] = v;
            }
        }
    }
    FamilyJets {
        gamma,
        sigma,
        shape,
        normal_conn,
    }
}

fn blocks(f: &Arr<Taylor>, jac1: &Arr<Taylor>, v1: &Arr<Taylor>, proj: &Projector<'_>) -> BlockJets {
    let (n, m) = (jac1.shape()[0], jac1.shape()[1]);
    let k = v1.shape()[0];
    let applyf = |x: &dyn Fn(usize) -> Taylor| -> Vec<Taylor> {
        let xs: Vec<Taylor> = (0..n).map(x).collect();
        (0..n)
            .map(|i| {
                let mut acc = f[[i, 0]].mul_ref(&xs[0]);
                for j in 1..n {
                    acc += f[[i, j]].mul_ref(&xs[j]);
                }
                acc
            })
            .collect()
    };
    let z = f[[0, 0]].zero_like();
    let mut fb = Arr::filled(&[m, m], z.clone());
    let mut hb = Arr::filled(&[k, m], z.clone());
    let mut tb = Arr::filled(&[m, k], z.clone());
    let mut sb = Arr::filled(&[k, k], z);
    for b in 0..m {
        let w = applyf(&|j| jac1[[j, b]].clone());
        for (c, v) in proj.tangent(&w).into_iter().enumerate() {
            fb[[c, b]] = v;
        }
        for (be, v) in proj.normal(&w).into_iter().enumerate() {
            hb[[be, b]] = v;
        }
    }
    for al in 0..k {
        let w = applyf(&|j| v1[[al, j]].clone());
        for (c, v) in proj.tangent(&w).into_iter().enumerate() {
            tb[[c, al]] = v;
        }
        for (be, v) in proj.normal(&w).into_iter().enumerate() {
            sb[[be, al]] = v;
        }
    }
    BlockJets {
        f: fb,
        h: hb,
        t: tb,
        s: sb,
    }
}

impl SubmanifoldJets {
    pub fn compute(geom: &ChartGeometry, imm: &Immersion, u: &[f64]) -> Result<SubmanifoldJets> {
        let n = geom.dim();
        let m = imm.dim();
        if m >= n {
            return Err(Error::NoNormalSpace { m, n });
        }
        if imm.map.len() != n {
            return Err(Error::Dimension {
                field: "immersion.map".into(),
                message: format!("expected {n} components, found {}", imm.map.len()),
            });
        }
        let k = n - m;
        let uvars = Taylor::variables(u, 3);
        let xs: Vec<Taylor> = imm.map.iter().map(|t| t.eval(&uvars)).collect::<Result<_>>()?;
        let x0: Vec<f64> = xs.iter().map(|t| t.value()).collect();
        let ambient = AmbientJets::at(geom, &x0)?;
        let delta: Vec<Taylor> = xs
            .iter()
            .map(|t| {
                let t2 = t.truncate(2);
                let c = t2.lift(t2.value());
                &t2 - &c
            })
            .collect();

        let jac2 = Arr::from_fn(&[n, m], |i| xs[i[0]].d(i[1]));
        let sv = singular_values(&jac2.values());
        let smallest = *sv.last().unwrap_or(&0.0);
        if !(smallest > RANK_TOL) {
            return Err(Error::RankDeficient {
                point: u.to_vec(),
                singular: smallest,
            });
        }
        let metric2 = compose_arr(&ambient.g, &delta);
        let frame = match &imm.normals {
            Some(_) => gram_schmidt_declared(imm, &uvars, &metric2, &jac2, u)?,
            None => gram_schmidt_derived(&metric2, &jac2, k, u)?,
        };
        if frame.len() != k {
            return Err(Error::Dimension {
                field: "immersion.normals".into(),
                message: format!("expected {k} normal fields, found {}", frame.len()),
            });
        }
        let normals2 = Arr::from_fn(&[k, n], |i| frame[i[0]][i[1]].clone());

        let gam = compose_arr(&ambient.gamma, &delta);
        let dgam = compose_arr(&ambient.dual_gamma, &delta);
        let f = ambient.f.as_ref().map(|a| compose_arr(a, &delta));
        let fs = ambient.f_star.as_ref().map(|a| compose_arr(a, &delta));

        let g1 = metric2.truncate(1);
        let jac1 = jac2.truncate(1);
        let v1 = normals2.truncate(1);
        let djac = Arr::from_fn(&[n, m, m], |i| jac2[[i[0], i[1]]].d(i[2]));
        let dv = Arr::from_fn(&[k, n, m], |i| normals2[[i[0], i[1]]].d(i[2]));
        let gj = crate::linalg::tmatmul(&g1, &jac1);
        let gind = crate::linalg::tmatmul(&crate::linalg::ttranspose(&jac1), &gj);
        let gind_inv = tinverse(&gind).ok_or_else(|| Error::RankDeficient {
            point: u.to_vec(),
            singular: smallest,
        })?;
        let gv = crate::linalg::tmatmul(&g1, &crate::linalg::ttranspose(&v1));
        let proj = Projector {
            jac: &jac1,
            gj,
            ginv: gind_inv.clone(),
            gv,
        };
        let primal = family(&gam, &jac1, &djac, &v1, &dv, &proj);
        let dual = family(&dgam, &jac1, &djac, &v1, &dv, &proj);
        let f_blocks = f.as_ref().map(|f| blocks(f, &jac1, &v1, &proj));
        let f_star_blocks = fs.as_ref().map(|f| blocks(f, &jac1, &v1, &proj));
        Ok(SubmanifoldJets {
            u: u.to_vec(),
            x: x0,
            ambient,
            metric2,
            jac2,
            normals2,
            gind,
            gind_inv,
            primal,
            dual,
            f_blocks,
            f_star_blocks,
        })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn codim(&self) -> usize {
        self.normals2.shape()[0]
    }

    pub fn frame(&self) -> FrameAt {
        let (n, m) = (self.jac2.shape()[0], self.jac2.shape()[1]);
        let k = self.codim();
        FrameAt {
            u: self.u.clone(),
            x: self.x.clone(),
            tangent: (0..m)
                .map(|a| (0..n).map(|i| self.jac2[[i, a]].value()).collect())
                .collect(),
            normal: (0..k)
                .map(|al| (0..n).map(|i| self.normals2[[al, i]].value()).collect())
                .collect(),
        }
    }

    /// Components on the orthonormal normal frame of the ambient coordinate
    /// field ∂_coord along M (order 1), together with the g̃-length of its
    /// tangential part at the base point.
    pub fn coordinate_normal(&self, coord: usize) -> (Vec<Taylor>, f64) {
        let n = self.jac2.shape()[0];
        let m = self.dim();
        let k = self.codim();
        let zero = self.metric2[[0, 0]].zero_like();
        let w: Vec<Taylor> = (0..n)
            .map(|i| if i == coord { zero.lift(1.0) } else { zero.clone() })
            .collect();
        let comps: Vec<Taylor> = (0..k)
            .map(|al| {
                let v: Vec<Taylor> = (0..n).map(|i| self.normals2[[al, i]].clone()).collect();
                inner(&self.metric2, &w, &v).truncate(1)
            })
            .collect();
        let g0 = self.ambient.metric();
        let tang: Vec<f64> = (0..m)
            .map(|a| (0..n).map(|i| g0[[coord, i]] * self.jac2[[i, a]].value()).sum())
            .collect();
        let gi = self.gind.values();
        let ginv = crate::linalg::metric_inverse_at(&gi, &self.u).unwrap_or(gi.clone());
        let mut len2 = 0.0;
        for a in 0..m {
            for b in 0..m {
                len2 += tang[a] * ginv[[a, b]] * tang[b];
            }
        }
        (comps, len2.max(0.0).sqrt())
    }
}

/// Frame-level values needed to move between ambient and frame components.
#[derive(Debug, Clone)]
pub struct FrameValues {
    /// `[[i, a]]`
    pub jac: Arr<f64>,
    /// `[[α, i]]`
    pub normals: Arr<f64>,
    pub ambient_metric: Arr<f64>,
    pub metric: Arr<f64>,
    pub metric_inv: Arr<f64>,
}

impl FrameValues {
    pub fn m(&self) -> usize {
        self.jac.shape()[1]
    }
    pub fn n(&self) -> usize {
        self.jac.shape()[0]
    }
    pub fn k(&self) -> usize {
        self.normals.shape()[0]
    }

    pub fn tangent_to_ambient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|i| (0..self.m()).map(|a| self.jac[[i, a]] * x[a]).sum())
            .collect()
    }

    pub fn normal_to_ambient(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|i| (0..self.k()).map(|al| self.normals[[al, i]] * v[al]).sum())
            .collect()
    }

    /// Tangent and normal components of an ambient vector.
    pub fn split(&self, w: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (n, m, k) = (self.n(), self.m(), self.k());
        let gw: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| self.ambient_metric[[i, j]] * w[j]).sum())
            .collect();
        let y: Vec<f64> = (0..m)
            .map(|a| (0..n).map(|i| self.jac[[i, a]] * gw[i]).sum())
            .collect();
        let t = (0..m)
            .map(|c| (0..m).map(|b| self.metric_inv[[c, b]] * y[b]).sum())
            .collect();
        let nn = (0..k)
            .map(|al| (0..n).map(|i| self.normals[[al, i]] * gw[i]).sum())
            .collect();
        (t, nn)
    }

    /// Induced metric g(X, Y).
    pub fn g(&self, x: &[f64], y: &[f64]) -> f64 {
        let m = self.m();
        let mut acc = 0.0;
        for a in 0..m {
            for b in 0..m {
                acc += x[a] * self.metric[[a, b]] * y[b];
            }
        }
        acc
    }

    pub fn basis(&self, a: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.m()];
        e[a] = 1.0;
        e
    }

    pub fn nbasis(&self, al: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.k()];
        e[al] = 1.0;
        e
    }
}

/// Value-level blocks with their covariant derivatives.
#[derive(Debug, Clone)]
pub struct BlocksAt {
    pub f: Arr<f64>,
    pub h: Arr<f64>,
    pub t: Arr<f64>,
    pub s: Arr<f64>,
    /// `(∇_a f) e_b = Σ_c nabla_f[a, c, b] e_c`
    pub nabla_f: Arr<f64>,
    /// `(D̄_a h) e_b`, `[[a, β, b]]`
    pub dbar_h: Arr<f64>,
    /// `(∇̄_a t) V_α`, `[[a, c, α]]`
    pub nbar_t: Arr<f64>,
    /// `(D_a s) V_α`, `[[a, β, α]]`
    pub d_s: Arr<f64>,
}

/// Value-level data of one connection family at a point.
#[derive(Debug, Clone)]
pub struct FamilyAt {
    pub kind: ConnectionKind,
    pub gamma: Arr<f64>,
    /// Induced curvature `[[d, a, b, c]]`.
    pub curvature: Arr<f64>,
    pub sigma: Arr<f64>,
    pub shape: Arr<f64>,
    pub normal_conn: Arr<f64>,
    /// R⊥ `[[a, b, β, α]]`.
    pub normal_curvature: Arr<f64>,
    /// `(D_a σ)(e_b, e_c)`, `[[a, β, b, c]]`.
    pub d_sigma: Arr<f64>,
    /// `(∇_a A)_{V_α} e_b`, `[[a, α, c, b]]`.
    pub nabla_shape: Arr<f64>,
    /// Ambient curvature at x(u) in ambient components `[[l, i, j, k]]`.
    pub ambient_curvature: Arr<f64>,
    pub blocks: Option<BlocksAt>,
}

fn blocks_at(b: &BlockJets, gamma: &Arr<f64>, d: &Arr<f64>) -> BlocksAt {
    let (f, h, t, s) = (b.f.values(), b.h.values(), b.t.values(), b.s.values());
    let (df, dh, dt, ds) = (
        b.f.derivatives(),
        b.h.derivatives(),
        b.t.derivatives(),
        b.s.derivatives(),
    );
    let m = f.shape()[0];
    let k = s.shape()[0];
    let nabla_f = Arr::from_fn(&[m, m, m], |x| {
        let (a, c, bb) = (x[0], x[1], x[2]);
        let mut acc = df[[a, c, bb]];
        for e in 0..m {
            acc += gamma[[c, a, e]] * f[[e, bb]] - f[[c, e]] * gamma[[e, a, bb]];
        }
        acc
    });
    let dbar_h = Arr::from_fn(&[m, k, m], |x| {
        let (a, be, bb) = (x[0], x[1], x[2]);
        let mut acc = dh[[a, be, bb]];
        for al in 0..k {
            acc += d[[a, be, al]] * h[[al, bb]];
        }
        for e in 0..m {
            acc -= h[[be, e]] * gamma[[e, a, bb]];
        }
        acc
    });
    let nbar_t = Arr::from_fn(&[m, m, k], |x| {
        let (a, c, al) = (x[0], x[1], x[2]);
        let mut acc = dt[[a, c, al]];
        for e in 0..m {
            acc += gamma[[c, a, e]] * t[[e, al]];
        }
        for be in 0..k {
            acc -= t[[c, be]] * d[[a, be, al]];
        }
        acc
    });
    let d_s = Arr::from_fn(&[m, k, k], |x| {
        let (a, be, al) = (x[0], x[1], x[2]);
        let mut acc = ds[[a, be, al]];
        for ga in 0..k {
            acc += d[[a, be, ga]] * s[[ga, al]] - s[[be, ga]] * d[[a, ga, al]];
        }
        acc
    });
    BlocksAt {
        f,
        h,
        t,
        s,
        nabla_f,
        dbar_h,
        nbar_t,
        d_s,
    }
}

fn family_at(
    kind: ConnectionKind,
    fj: &FamilyJets,
    blocks: Option<&BlockJets>,
    ambient_curvature: Arr<f64>,
) -> FamilyAt {
    let gamma = fj.gamma.values();
    let m = gamma.shape()[0];
    let sigma = fj.sigma.values();
    let k = sigma.shape()[0];
    let shape = fj.shape.values();
    let normal_conn = fj.normal_conn.values();
    let curvature = riemann_from_field(&fj.gamma);
    let dd = fj.normal_conn.derivatives(); // [e, a, β, α]
    let normal_curvature = Arr::from_fn(&[m, m, k, k], |x| {
        let (a, b, be, al) = (x[0], x[1], x[2], x[3]);
        let mut acc = 0.0;
        for ga in 0..k {
            acc += normal_conn[[a, be, ga]] * normal_conn[[b, ga, al]]
                - normal_conn[[b, be, ga]] * normal_conn[[a, ga, al]];
        }
        (dd[[a, b, be, al]] - dd[[b, a, be, al]]) + acc
    });
    let ds = fj.sigma.derivatives(); // [a, β, b, c]
    let d_sigma = Arr::from_fn(&[m, k, m, m], |x| {
        let (a, be, b, c) = (x[0], x[1], x[2], x[3]);
        let mut acc = ds[[a, be, b, c]];
        for al in 0..k {
            acc += normal_conn[[a, be, al]] * sigma[[al, b, c]];
        }
        for d in 0..m {
            acc -= gamma[[d, a, b]] * sigma[[be, d, c]] + gamma[[d, a, c]] * sigma[[be, b, d]];
        }
        acc
    });
    let dsh = fj.shape.derivatives(); // [a, α, c, b]
    let nabla_shape = Arr::from_fn(&[m, k, m, m], |x| {
        let (a, al, c, b) = (x[0], x[1], x[2], x[3]);
        let mut acc = dsh[[a, al, c, b]];
        for d in 0..m {
            acc += gamma[[c, a, d]] * shape[[al, d, b]] - shape[[al, c, d]] * gamma[[d, a, b]];
        }
        for be in 0..k {
            acc -= normal_conn[[a, be, al]] * shape[[be, c, b]];
        }
        acc
    });
    let blocks = blocks.map(|b| blocks_at(b, &gamma, &normal_conn));
    FamilyAt {
        kind,
        gamma,
        curvature,
        sigma,
        shape,
        normal_conn,
        normal_curvature,
        d_sigma,
        nabla_shape,
        ambient_curvature,
        blocks,
    }
}

/// Value-level induced geometry at one domain point.
#[derive(Debug, Clone)]
pub struct InducedGeometryAt {
    pub frame: FrameAt,
    pub values: FrameValues,
    pub primal: FamilyAt,
    pub dual: FamilyAt,
    /// Derivatives of the induced metric `[[e, a, b]]`.
    pub metric_derivs: Arr<f64>,
}

impl InducedGeometryAt {
    pub fn from_jets(j: &SubmanifoldJets) -> InducedGeometryAt {
        let values = FrameValues {
            jac: j.jac2.values(),
            normals: j.normals2.values(),
            ambient_metric: j.ambient.metric(),
            metric: j.gind.values(),
            metric_inv: j.gind_inv.values(),
        };
        let primal = family_at(
            ConnectionKind::Primal,
            &j.primal,
            j.f_blocks.as_ref(),
            j.ambient.curvature(ConnectionKind::Primal).r,
        );
        let dual = family_at(
            ConnectionKind::Dual,
            &j.dual,
            j.f_star_blocks.as_ref(),
            j.ambient.curvature(ConnectionKind::Dual).r,
        );
        InducedGeometryAt {
            frame: j.frame(),
            values,
            primal,
            dual,
            metric_derivs: j.gind.derivatives(),
        }
    }

    pub fn compute(geom: &ChartGeometry, imm: &Immersion, u: &[f64]) -> Result<InducedGeometryAt> {
        Ok(InducedGeometryAt::from_jets(&SubmanifoldJets::compute(geom, imm, u)?))
    }

    pub fn family(&self, kind: ConnectionKind) -> &FamilyAt {
        match kind {
            ConnectionKind::Dual => &self.dual,
            _ => &self.primal,
        }
    }
}

/// Tangent frame and g̃-orthonormal normal frame at a domain point.
pub fn frames_at(geom: &ChartGeometry, imm: &Immersion, u: &[f64]) -> Result<FrameAt> {
    Ok(SubmanifoldJets::compute(geom, imm, u)?.frame())
}

/// g_ab = g̃(e_a, e_b).
pub fn induced_metric_at(frame: &FrameAt, ambient_metric: &Arr<f64>) -> Arr<f64> {
    let m = frame.tangent.len();
    let n = ambient_metric.shape()[0];
    Arr::from_fn(&[m, m], |x| {
        let (a, b) = (x[0], x[1]);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += frame.tangent[a][i] * ambient_metric[[i, j]] * frame.tangent[b][j];
            }
        }
        acc
    })
}

/// Induced connection coefficients and second fundamental form of one family.
pub fn gauss_decompose_at(
    geom: &ChartGeometry,
    imm: &Immersion,
    kind: ConnectionKind,
    u: &[f64],
) -> Result<(Arr<f64>, Arr<f64>)> {
    let j = SubmanifoldJets::compute(geom, imm, u)?;
    let f = if kind == ConnectionKind::Dual { &j.dual } else { &j.primal };
    Ok((f.gamma.values(), f.sigma.values()))
}

/// Shape operators (A, A*) indexed `[[α, c, b]]` for the orthonormal normals.
pub fn shape_operators_at(geom: &ChartGeometry, imm: &Immersion, u: &[f64]) -> Result<(Arr<f64>, Arr<f64>)> {
    let j = SubmanifoldJets::compute(geom, imm, u)?;
    Ok((j.primal.shape.values(), j.dual.shape.values()))
}

/// Normal connection coefficients `[[a, β, α]]` of one family.
pub fn normal_connection_at(
    geom: &ChartGeometry,
    imm: &Immersion,
    u: &[f64],
    kind: ConnectionKind,
) -> Result<Arr<f64>> {
    let j = SubmanifoldJets::compute(geom, imm, u)?;
    let f = if kind == ConnectionKind::Dual { &j.dual } else { &j.primal };
    Ok(f.normal_conn.values())
}

/// f/h/t/s blocks of F and F* at a point.
#[derive(Debug, Clone)]
pub struct FHTSAt {
    pub f: Arr<f64>,
    pub h: Arr<f64>,
    pub t: Arr<f64>,
    pub s: Arr<f64>,
    pub f_star: Arr<f64>,
    pub h_star: Arr<f64>,
    pub t_star: Arr<f64>,
    pub s_star: Arr<f64>,
}

pub fn fhts_at(geom: &ChartGeometry, imm: &Immersion, u: &[f64]) -> Result<Option<FHTSAt>> {
    let j = SubmanifoldJets::compute(geom, imm, u)?;
    Ok(match (&j.f_blocks, &j.f_star_blocks) {
        (Some(b), Some(bs)) => Some(FHTSAt {
            f: b.f.values(),
            h: b.h.values(),
            t: b.t.values(),
            s: b.s.values(),
            f_star: bs.f.values(),
            h_star: bs.h.values(),
            t_star: bs.t.values(),
            s_star: bs.s.values(),
        }),
        _ => None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariance {
    FInvariant,
    FAntiInvariant,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceClass {
    pub verdict: Invariance,
    pub max_h: f64,
    pub max_f: f64,
}

impl InvarianceClass {
    pub fn classify(max_h: f64, max_f: f64, tol: f64) -> InvarianceClass {
        let verdict = if max_h < tol {
            Invariance::FInvariant
        } else if max_f < tol {
            Invariance::FAntiInvariant
        } else {
            Invariance::Mixed
        };
        InvarianceClass {
            verdict,
            max_h,
            max_f,
        }
    }
}
