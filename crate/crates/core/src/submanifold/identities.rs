//! Pointwise residuals of the submanifold identities.
//!
//! Every function evaluates its identities on the coordinate tangent frame
//! and the orthonormal normal frame at one point and returns the largest
//! component deviation of each named identity. The starred companions are the
//! same code with the two connection families (and F, F*) swapped.

use super::{BlocksAt, FamilyAt, FrameValues, InducedGeometryAt};

pub type Named = Vec<(&'static str, f64)>;

pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn scale(s: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

pub(crate) fn maxdiff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub(crate) fn maxabs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Sum of a list of equally sized vectors.
pub(crate) fn sum(parts: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; parts[0].len()];
    for p in parts {
        for (o, x) in out.iter_mut().zip(p) {
            *o += x;
        }
    }
    out
}

/// One connection family seen through the frame, with its structure blocks.
#[derive(Clone, Copy)]
pub struct View<'a> {
    pub fam: &'a FamilyAt,
    pub fv: &'a FrameValues,
}

impl<'a> View<'a> {
    pub fn new(fam: &'a FamilyAt, fv: &'a FrameValues) -> View<'a> {
        View { fam, fv }
    }

    pub fn m(&self) -> usize {
        self.fv.m()
    }

    pub fn k(&self) -> usize {
        self.fv.k()
    }

    pub fn blocks(&self) -> &'a BlocksAt {
        self.fam.blocks.as_ref().expect("structure blocks")
    }

    /// σ(X, Y)
    pub fn sigma(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let (m, k) = (self.m(), self.k());
        (0..k)
            .map(|al| {
                let mut acc = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        acc += x[a] * y[b] * self.fam.sigma[[al, a, b]];
                    }
                }
                acc
            })
            .collect()
    }

    /// A_V X
    pub fn shape(&self, v: &[f64], x: &[f64]) -> Vec<f64> {
        let (m, k) = (self.m(), self.k());
        (0..m)
            .map(|c| {
                let mut acc = 0.0;
                for al in 0..k {
                    for b in 0..m {
                        acc += v[al] * x[b] * self.fam.shape[[al, c, b]];
                    }
                }
                acc
            })
            .collect()
    }

    /// Induced R(X, Y)Z.
    pub fn r(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let m = self.m();
        (0..m)
            .map(|d| {
                let mut acc = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        let xy = x[a] * y[b];
                        if xy == 0.0 {
                            continue;
                        }
                        for c in 0..m {
                            acc += xy * z[c] * self.fam.curvature[[d, a, b, c]];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// R⊥(X, Y)V
    pub fn rperp(&self, x: &[f64], y: &[f64], v: &[f64]) -> Vec<f64> {
        let (m, k) = (self.m(), self.k());
        (0..k)
            .map(|be| {
                let mut acc = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        for al in 0..k {
                            acc += x[a] * y[b] * v[al] * self.fam.normal_curvature[[a, b, be, al]];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// D_X V
    pub fn d(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let (m, k) = (self.m(), self.k());
        (0..k)
            .map(|be| {
                let mut acc = 0.0;
                for a in 0..m {
                    for al in 0..k {
                        acc += x[a] * v[al] * self.fam.normal_conn[[a, be, al]];
                    }
                }
                acc
            })
            .collect()
    }

    /// (D_X σ)(Y, Z)
    pub fn dsigma(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let (m, k) = (self.m(), self.k());
        (0..k)
            .map(|be| {
                let mut acc = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        for c in 0..m {
                            acc += x[a] * y[b] * z[c] * self.fam.d_sigma[[a, be, b, c]];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// (D_X σ)(Y, Z) − (D_Y σ)(X, Z)
    pub fn codazzi(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        sub(&self.dsigma(x, y, z), &self.dsigma(y, x, z))
    }

    /// (∇_X A)_V Y
    pub fn nabla_shape(&self, x: &[f64], v: &[f64], y: &[f64]) -> Vec<f64> {
        let (m, k) = (self.m(), self.k());
        (0..m)
            .map(|c| {
                let mut acc = 0.0;
                for a in 0..m {
                    for al in 0..k {
                        for b in 0..m {
                            acc += x[a] * v[al] * y[b] * self.fam.nabla_shape[[a, al, c, b]];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// Tangent and normal parts of the ambient curvature on tangent vectors.
    pub fn ambient_r_tangent(&self, x: &[f64], y: &[f64], z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (xa, ya, za) = (
            self.fv.tangent_to_ambient(x),
            self.fv.tangent_to_ambient(y),
            self.fv.tangent_to_ambient(z),
        );
        self.fv.split(&self.ambient_r(&xa, &ya, &za))
    }

    /// Tangent and normal parts of R̃(X, Y)V.
    pub fn ambient_r_normal(&self, x: &[f64], y: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (xa, ya, va) = (
            self.fv.tangent_to_ambient(x),
            self.fv.tangent_to_ambient(y),
            self.fv.normal_to_ambient(v),
        );
        self.fv.split(&self.ambient_r(&xa, &ya, &va))
    }

    fn ambient_r(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.fv.n();
        let r = &self.fam.ambient_curvature;
        (0..n)
            .map(|l| {
                let mut acc = 0.0;
                for i in 0..n {
                    if x[i] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        if y[j] == 0.0 {
                            continue;
                        }
                        for kk in 0..n {
                            acc += x[i] * y[j] * z[kk] * r[[l, i, j, kk]];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn f(&self, x: &[f64]) -> Vec<f64> {
        let b = self.blocks();
        let m = self.m();
        (0..m).map(|c| (0..m).map(|d| b.f[[c, d]] * x[d]).sum()).collect()
    }

    pub fn h(&self, x: &[f64]) -> Vec<f64> {
        let b = self.blocks();
        (0..self.k())
            .map(|be| (0..self.m()).map(|d| b.h[[be, d]] * x[d]).sum())
            .collect()
    }

    pub fn t(&self, v: &[f64]) -> Vec<f64> {
        let b = self.blocks();
        (0..self.m())
            .map(|c| (0..self.k()).map(|al| b.t[[c, al]] * v[al]).sum())
            .collect()
    }

    pub fn s(&self, v: &[f64]) -> Vec<f64> {
        let b = self.blocks();
        let k = self.k();
        (0..k).map(|be| (0..k).map(|al| b.s[[be, al]] * v[al]).sum()).collect()
    }

    /// (∇_X f)Y
    pub fn nabla_f(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let b = self.blocks();
        let m = self.m();
        (0..m)
            .map(|c| {
                let mut acc = 0.0;
                for a in 0..m {
                    for d in 0..m {
                        acc += x[a] * y[d] * b.nabla_f[[a, c, d]];
                    }
                }
                acc
            })
            .collect()
    }

    /// (D̄_X h)Y
    pub fn dbar_h(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let b = self.blocks();
        let (m, k) = (self.m(), self.k());
        (0..k)
            .map(|be| {
                let mut acc = 0.0;
                for a in 0..m {
                    for d in 0..m {
                        acc += x[a] * y[d] * b.dbar_h[[a, be, d]];
                    }
                }
                acc
            })
            .collect()
    }

    /// (∇̄_X t)V
    pub fn nbar_t(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let b = self.blocks();
        let (m, k) = (self.m(), self.k());
        (0..m)
            .map(|c| {
                let mut acc = 0.0;
                for a in 0..m {
                    for al in 0..k {
                        acc += x[a] * v[al] * b.nbar_t[[a, c, al]];
                    }
                }
                acc
            })
            .collect()
    }

    /// (D_X s)V
    pub fn d_s(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let b = self.blocks();
        let (m, k) = (self.m(), self.k());
        (0..k)
            .map(|be| {
                let mut acc = 0.0;
                for a in 0..m {
                    for al in 0..k {
                        acc += x[a] * v[al] * b.d_s[[a, be, al]];
                    }
                }
                acc
            })
            .collect()
    }
}

fn views(ig: &InducedGeometryAt) -> (View<'_>, View<'_>) {
    (View::new(&ig.primal, &ig.values), View::new(&ig.dual, &ig.values))
}

/// Frame invariants: tangent/normal orthogonality and normal orthonormality.
pub fn frame_residuals(ig: &InducedGeometryAt) -> Named {
    let fr = &ig.frame;
    let g = &ig.values.ambient_metric;
    let n = g.shape()[0];
    let pair = |v: &[f64], w: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += v[i] * g[[i, j]] * w[j];
            }
        }
        acc
    };
    let mut orth: f64 = 0.0;
    for t in &fr.tangent {
        for nv in &fr.normal {
            orth = orth.max(pair(t, nv).abs());
        }
    }
    let mut on: f64 = 0.0;
    for (a, v) in fr.normal.iter().enumerate() {
        for (b, w) in fr.normal.iter().enumerate() {
            let want = if a == b { 1.0 } else { 0.0 };
            on = on.max((pair(v, w) - want).abs());
        }
    }
    vec![("tangent_normal_orthogonality", orth), ("normal_orthonormality", on)]
}

fn pairing(this: &View, other: &View) -> f64 {
    // g̃(σ(X,Y),V) = g(Y, A*_V X)
    let (m, k) = (this.m(), this.k());
    let mut r: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let (x, y) = (this.fv.basis(a), this.fv.basis(b));
            let s = this.sigma(&x, &y);
            for al in 0..k {
                let v = this.fv.nbasis(al);
                let rhs = this.fv.g(&y, &other.shape(&v, &x));
                r = r.max((s[al] - rhs).abs());
            }
        }
    }
    r
}

fn self_adjoint(view: &View) -> f64 {
    let (m, k) = (view.m(), view.k());
    let mut r: f64 = 0.0;
    for al in 0..k {
        let v = view.fv.nbasis(al);
        for a in 0..m {
            for b in 0..m {
                let (x, y) = (view.fv.basis(a), view.fv.basis(b));
                let lhs = view.fv.g(&view.shape(&v, &x), &y);
                let rhs = view.fv.g(&x, &view.shape(&v, &y));
                r = r.max((lhs - rhs).abs());
            }
        }
    }
    r
}

fn sigma_symmetry(fam: &FamilyAt) -> f64 {
    let s = fam.sigma.shape();
    let mut r: f64 = 0.0;
    for al in 0..s[0] {
        for a in 0..s[1] {
            for b in 0..s[2] {
                r = r.max((fam.sigma[[al, a, b]] - fam.sigma[[al, b, a]]).abs());
            }
        }
    }
    r
}

/// Pairing of σ with A*, self-adjointness of the shape operators, symmetry of σ.
pub fn lemma4_residuals(ig: &InducedGeometryAt) -> Named {
    let (p, d) = views(ig);
    vec![
        ("pairing", pairing(&p, &d)),
        ("pairing_star", pairing(&d, &p)),
        ("self_adjoint", self_adjoint(&p)),
        ("self_adjoint_star", self_adjoint(&d)),
        ("sigma_symmetric", sigma_symmetry(&ig.primal)),
        ("sigma_star_symmetric", sigma_symmetry(&ig.dual)),
    ]
}

/// Duality of the induced connections and of the normal connections.
pub fn duality_residuals(ig: &InducedGeometryAt) -> Named {
    let g = &ig.values.metric;
    let dg = &ig.metric_derivs;
    let (gp, gd) = (&ig.primal.gamma, &ig.dual.gamma);
    let m = g.shape()[0];
    let mut r: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let mut rhs = 0.0;
                for d in 0..m {
                    rhs += gp[[d, a, b]] * g[[d, c]] + gd[[d, a, c]] * g[[b, d]];
                }
                r = r.max((dg[[a, b, c]] - rhs).abs());
            }
        }
    }
    // 0 = X g̃(V_α, V_β) = g̃(D_X V_α, V_β) + g̃(V_α, D*_X V_β)
    let (dp, dd) = (&ig.primal.normal_conn, &ig.dual.normal_conn);
    let k = dp.shape()[1];
    let mut rn: f64 = 0.0;
    for a in 0..m {
        for al in 0..k {
            for be in 0..k {
                rn = rn.max((dp[[a, be, al]] + dd[[a, al, be]]).abs());
            }
        }
    }
    vec![("induced_duality", r), ("normal_duality", rn)]
}

fn fhts_family(v: &View) -> [f64; 4] {
    let (m, k) = (v.m(), v.k());
    let mut out = [0.0f64; 4];
    for a in 0..m {
        let x = v.fv.basis(a);
        // f²X = X − thX ; hfX + shX = 0
        let lhs = v.f(&v.f(&x));
        let rhs = sub(&x, &v.t(&v.h(&x)));
        out[0] = out[0].max(maxdiff(&lhs, &rhs));
        out[1] = out[1].max(maxabs(&add(&v.h(&v.f(&x)), &v.s(&v.h(&x)))));
    }
    for al in 0..k {
        let u = v.fv.nbasis(al);
        // ftV + tsV = 0 ; s²V = V − htV
        out[2] = out[2].max(maxabs(&add(&v.f(&v.t(&u)), &v.t(&v.s(&u)))));
        out[3] = out[3].max(maxdiff(&v.s(&v.s(&u)), &sub(&u, &v.h(&v.t(&u)))));
    }
    out
}

/// Block identities of the decomposition of F and F* and their metric pairings.
pub fn fhts_residuals(ig: &InducedGeometryAt) -> Named {
    let (p, d) = views(ig);
    let fp = fhts_family(&p);
    let fd = fhts_family(&d);
    let fv = &ig.values;
    let (m, k) = (fv.m(), fv.k());
    let inner_n = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut pr = [0.0f64; 6];
    for a in 0..m {
        for b in 0..m {
            let (x, y) = (fv.basis(a), fv.basis(b));
            pr[0] = pr[0].max((fv.g(&p.f(&x), &y) - fv.g(&x, &d.f(&y))).abs());
            let lhs = fv.g(&p.f(&x), &d.f(&y));
            let rhs = fv.g(&x, &y) - inner_n(&p.h(&x), &d.h(&y));
            pr[1] = pr[1].max((lhs - rhs).abs());
        }
        for al in 0..k {
            let (x, v) = (fv.basis(a), fv.nbasis(al));
            pr[2] = pr[2].max((inner_n(&p.h(&x), &v) - fv.g(&x, &d.t(&v))).abs());
            pr[3] = pr[3].max((inner_n(&d.h(&x), &v) - fv.g(&x, &p.t(&v))).abs());
        }
    }
    for al in 0..k {
        for be in 0..k {
            let (u, v) = (fv.nbasis(al), fv.nbasis(be));
            pr[4] = pr[4].max((inner_n(&p.s(&u), &v) - inner_n(&u, &d.s(&v))).abs());
            let lhs = inner_n(&p.s(&u), &d.s(&v));
            let rhs = inner_n(&u, &v) - fv.g(&p.t(&u), &d.t(&v));
            pr[5] = pr[5].max((lhs - rhs).abs());
        }
    }
    vec![
        ("f2", fp[0]),
        ("hf_sh", fp[1]),
        ("ft_ts", fp[2]),
        ("s2", fp[3]),
        ("f2_star", fd[0]),
        ("hf_sh_star", fd[1]),
        ("ft_ts_star", fd[2]),
        ("s2_star", fd[3]),
        ("g_f_fstar", pr[0]),
        ("g_f_fstar_h", pr[1]),
        ("g_h_tstar", pr[2]),
        ("g_hstar_t", pr[3]),
        ("g_s_sstar", pr[4]),
        ("g_s_sstar_t", pr[5]),
    ]
}

/// Largest entries of the blocks (max|f|, max|h|, max|t|, max|s|) of F and F*.
pub fn block_sizes(ig: &InducedGeometryAt) -> Option<([f64; 4], [f64; 4])> {
    let bp = ig.primal.blocks.as_ref()?;
    let bd = ig.dual.blocks.as_ref()?;
    let m = |b: &BlocksAt| [b.f.max_abs(), b.h.max_abs(), b.t.max_abs(), b.s.max_abs()];
    Some((m(bp), m(bd)))
}

fn lemma7_family(v: &View) -> [f64; 4] {
    let (m, k) = (v.m(), v.k());
    let mut out = [0.0f64; 4];
    for a in 0..m {
        let x = v.fv.basis(a);
        for b in 0..m {
            let y = v.fv.basis(b);
            let s = v.sigma(&x, &y);
            // (∇_X f)Y − A_{hY}X − t(σ(X,Y))
            let e1 = sum(&[
                v.nabla_f(&x, &y),
                scale(-1.0, &v.shape(&v.h(&y), &x)),
                scale(-1.0, &v.t(&s)),
            ]);
            // (D̄_X h)Y + σ(X,fY) − s(σ(X,Y))
            let e2 = sum(&[v.dbar_h(&x, &y), v.sigma(&x, &v.f(&y)), scale(-1.0, &v.s(&s))]);
            out[0] = out[0].max(maxabs(&e1));
            out[1] = out[1].max(maxabs(&e2));
        }
        for al in 0..k {
            let u = v.fv.nbasis(al);
            let au = v.shape(&u, &x);
            // (∇̄_X t)V − A_{sV}X + f(A_V X)
            let e3 = sum(&[v.nbar_t(&x, &u), scale(-1.0, &v.shape(&v.s(&u), &x)), v.f(&au)]);
            // (D_X s)V + σ(X,tV) + h(A_V X)
            let e4 = sum(&[v.d_s(&x, &u), v.sigma(&x, &v.t(&u)), v.h(&au)]);
            out[2] = out[2].max(maxabs(&e3));
            out[3] = out[3].max(maxabs(&e4));
        }
    }
    out
}

/// The four covariant-derivative identities of f, h, t, s and their starred forms.
pub fn lemma7_residuals(ig: &InducedGeometryAt) -> Named {
    let (p, d) = views(ig);
    let a = lemma7_family(&p);
    let b = lemma7_family(&d);
    vec![
        ("nabla_f", a[0]),
        ("dbar_h", a[1]),
        ("nbar_t", a[2]),
        ("d_s", a[3]),
        ("nabla_f_star", b[0]),
        ("dbar_h_star", b[1]),
        ("nbar_t_star", b[2]),
        ("d_s_star", b[3]),
    ]
}

/// g((∇_Z f)X, Y) = g(X, (∇*_Z f*)Y) and the normal analogue for s.
pub fn lemma6_residuals(ig: &InducedGeometryAt) -> Named {
    let (p, d) = views(ig);
    let fv = &ig.values;
    let (m, k) = (fv.m(), fv.k());
    let (mut rf, mut rs) = (0.0f64, 0.0f64);
    for c in 0..m {
        let z = fv.basis(c);
        for a in 0..m {
            for b in 0..m {
                let (x, y) = (fv.basis(a), fv.basis(b));
                let lhs = fv.g(&p.nabla_f(&z, &x), &y);
                let rhs = fv.g(&x, &d.nabla_f(&z, &y));
                rf = rf.max((lhs - rhs).abs());
            }
        }
        for al in 0..k {
            for be in 0..k {
                let lhs = p.d_s(&z, &fv.nbasis(al))[be];
                let rhs = d.d_s(&z, &fv.nbasis(be))[al];
                rs = rs.max((lhs - rhs).abs());
            }
        }
    }
    vec![("f_pairing", rf), ("s_pairing", rs)]
}

/// Largest entries of ∇f, D s (this family) for the parallelism equivalences.
pub fn parallel_sizes(fam: &FamilyAt) -> Option<(f64, f64)> {
    let b = fam.blocks.as_ref()?;
    Some((b.nabla_f.max_abs(), b.d_s.max_abs()))
}

fn gcr_family(this: &View, other: &View) -> [f64; 4] {
    let (m, k) = (this.m(), this.k());
    let mut out = [0.0f64; 4];
    for a in 0..m {
        for b in 0..m {
            let (x, y) = (this.fv.basis(a), this.fv.basis(b));
            for c in 0..m {
                let z = this.fv.basis(c);
                let (tan, nor) = this.ambient_r_tangent(&x, &y, &z);
                for d in 0..m {
                    let w = this.fv.basis(d);
                    // g̃(R̃(X,Y)Z,W) = g(R(X,Y)Z,W) − g̃(σ(Y,Z),σ*(X,W)) + g̃(σ(X,Z),σ*(Y,W))
                    let lhs = this.fv.g(&tan, &w);
                    let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(u, v)| u * v).sum::<f64>();
                    let rhs = this.fv.g(&this.r(&x, &y, &z), &w)
                        - dot(&this.sigma(&y, &z), &other.sigma(&x, &w))
                        + dot(&this.sigma(&x, &z), &other.sigma(&y, &w));
                    out[0] = out[0].max((lhs - rhs).abs());
                }
                out[1] = out[1].max(maxdiff(&nor, &this.codazzi(&x, &y, &z)));
            }
            for al in 0..k {
                let v = this.fv.nbasis(al);
                let (tan, nor) = this.ambient_r_normal(&x, &y, &v);
                for be in 0..k {
                    let u = this.fv.nbasis(be);
                    // g̃(R̃(X,Y)V,U) = g̃(R⊥(X,Y)V,U) + g([A*_U, A_V]X, Y)
                    let comm = sub(
                        &other.shape(&u, &this.shape(&v, &x)),
                        &this.shape(&v, &other.shape(&u, &x)),
                    );
                    let rhs = this.rperp(&x, &y, &v)[be] + this.fv.g(&comm, &y);
                    out[2] = out[2].max((nor[be] - rhs).abs());
                }
                // tangent part of R̃(X,Y)V = −(∇_X A)_V Y + (∇_Y A)_V X
                let rhs = sub(&this.nabla_shape(&y, &v, &x), &this.nabla_shape(&x, &v, &y));
                out[3] = out[3].max(maxdiff(&tan, &rhs));
            }
        }
    }
    out
}

/// Gauss, Codazzi and Ricci equations for both families, plus the tangential
/// part of R̃(X,Y)V.
pub fn gauss_codazzi_ricci_residuals(ig: &InducedGeometryAt) -> Named {
    let (p, d) = views(ig);
    let a = gcr_family(&p, &d);
    let b = gcr_family(&d, &p);
    vec![
        ("gauss", a[0]),
        ("codazzi", a[1]),
        ("gauss_star", b[0]),
        ("codazzi_star", b[1]),
        ("ricci", a[2]),
        ("ricci_star", b[2]),
        ("normal_curvature_tangent", a[3]),
        ("normal_curvature_tangent_star", b[3]),
    ]
}

fn structure_family(v: &View) -> [f64; 4] {
    let (m, k) = (v.m(), v.k());
    let mut out = [0.0f64; 4];
    let neg = |a: Vec<f64>| scale(-1.0, &a);
    for a in 0..m {
        for b in 0..m {
            let (x, y) = (v.fv.basis(a), v.fv.basis(b));
            for c in 0..m {
                let z = v.fv.basis(c);
                let (fz, hz) = (v.f(&z), v.h(&z));
                let codz = v.codazzi(&x, &y, &z);
                let ayx = v.shape(&v.sigma(&y, &z), &x);
                let axy = v.shape(&v.sigma(&x, &z), &y);
                let lhs1 = sum(&[
                    v.r(&x, &y, &fz),
                    neg(v.shape(&v.sigma(&y, &fz), &x)),
                    v.shape(&v.sigma(&x, &fz), &y),
                    neg(v.nabla_shape(&x, &hz, &y)),
                    v.nabla_shape(&y, &hz, &x),
                ]);
                let rhs1 = sum(&[v.f(&v.r(&x, &y, &z)), neg(v.f(&ayx)), v.f(&axy), v.t(&codz)]);
                out[0] = out[0].max(maxdiff(&lhs1, &rhs1));
                let lhs2 = sum(&[
                    v.rperp(&x, &y, &hz),
                    neg(v.sigma(&x, &v.shape(&hz, &y))),
                    v.sigma(&y, &v.shape(&hz, &x)),
                    v.codazzi(&x, &y, &fz),
                ]);
                let rhs2 = sum(&[v.h(&v.r(&x, &y, &z)), neg(v.h(&ayx)), v.h(&axy), v.s(&codz)]);
                out[1] = out[1].max(maxdiff(&lhs2, &rhs2));
            }
            for al in 0..k {
                let u = v.fv.nbasis(al);
                let (tu, su) = (v.t(&u), v.s(&u));
                let nxy = v.nabla_shape(&x, &u, &y);
                let nyx = v.nabla_shape(&y, &u, &x);
                let rp = v.rperp(&x, &y, &u);
                let sxa = v.sigma(&x, &v.shape(&u, &y));
                let sya = v.sigma(&y, &v.shape(&u, &x));
                let lhs3 = sum(&[
                    v.r(&x, &y, &tu),
                    neg(v.shape(&v.sigma(&y, &tu), &x)),
                    v.shape(&v.sigma(&x, &tu), &y),
                    neg(v.nabla_shape(&x, &su, &y)),
                    v.nabla_shape(&y, &su, &x),
                ]);
                let rhs3 = sum(&[neg(v.f(&nxy)), v.f(&nyx), v.t(&rp), neg(v.t(&sxa)), v.t(&sya)]);
                out[2] = out[2].max(maxdiff(&lhs3, &rhs3));
                let lhs4 = sum(&[
                    v.rperp(&x, &y, &su),
                    neg(v.sigma(&x, &v.shape(&su, &y))),
                    v.sigma(&y, &v.shape(&su, &x)),
                    v.codazzi(&x, &y, &tu),
                ]);
                let rhs4 = sum(&[v.s(&rp), neg(v.s(&sxa)), v.s(&sya), neg(v.h(&nxy)), v.h(&nyx)]);
                out[3] = out[3].max(maxdiff(&lhs4, &rhs4));
            }
        }
    }
    out
}

/// Curvature identities from the commutation of F with R̃, both families.
pub fn structure_curvature_residuals(ig: &InducedGeometryAt) -> Named {
    let (p, d) = views(ig);
    let a = structure_family(&p);
    let b = structure_family(&d);
    vec![
        ("tangent_fz", a[0]),
        ("normal_hz", a[1]),
        ("tangent_tv", a[2]),
        ("normal_sv", a[3]),
        ("tangent_fz_star", b[0]),
        ("normal_hz_star", b[1]),
        ("tangent_tv_star", b[2]),
        ("normal_sv_star", b[3]),
    ]
}

/// Consequences of the model curvature with constant `c` on the submanifold.
pub fn eq_o_submanifold_residuals(ig: &InducedGeometryAt, c: f64) -> Named {
    let v = View::new(&ig.primal, &ig.values);
    let fv = &ig.values;
    let (m, k) = (v.m(), v.k());
    let mut out = [0.0f64; 4];
    for a in 0..m {
        for b in 0..m {
            let (x, y) = (fv.basis(a), fv.basis(b));
            let (fx, fy) = (v.f(&x), v.f(&y));
            let skew = fv.g(&fx, &y) - fv.g(&x, &fy);
            for cc in 0..m {
                let z = fv.basis(cc);
                let fz = v.f(&z);
                let (gyfz, gxfz) = (fv.g(&y, &fz), fv.g(&x, &fz));
                let model_t = scale(
                    c,
                    &sum(&[
                        scale(fv.g(&y, &z), &x),
                        scale(-fv.g(&x, &z), &y),
                        scale(gyfz, &fx),
                        scale(-gxfz, &fy),
                        scale(skew, &fz),
                    ]),
                );
                let rhs1 = sum(&[
                    model_t,
                    v.shape(&v.sigma(&y, &z), &x),
                    scale(-1.0, &v.shape(&v.sigma(&x, &z), &y)),
                ]);
                out[0] = out[0].max(maxdiff(&v.r(&x, &y, &z), &rhs1));
                let rhs2 = scale(
                    c,
                    &sum(&[scale(gyfz, &v.h(&x)), scale(-gxfz, &v.h(&y)), scale(skew, &v.h(&z))]),
                );
                out[1] = out[1].max(maxdiff(&v.codazzi(&x, &y, &z), &rhs2));
            }
            for al in 0..k {
                let u = fv.nbasis(al);
                let tu = v.t(&u);
                let (gytv, gxtv) = (fv.g(&y, &tu), fv.g(&x, &tu));
                let lhs3 = sub(&v.nabla_shape(&x, &u, &y), &v.nabla_shape(&y, &u, &x));
                let rhs3 = scale(c, &sum(&[scale(-gytv, &fx), scale(gxtv, &fy), scale(-skew, &tu)]));
                out[2] = out[2].max(maxdiff(&lhs3, &rhs3));
                let lhs4 = sum(&[
                    v.rperp(&x, &y, &u),
                    scale(-1.0, &v.sigma(&x, &v.shape(&u, &y))),
                    v.sigma(&y, &v.shape(&u, &x)),
                ]);
                let rhs4 = scale(
                    c,
                    &sum(&[scale(gytv, &v.h(&x)), scale(-gxtv, &v.h(&y)), scale(skew, &v.s(&u))]),
                );
                out[3] = out[3].max(maxdiff(&lhs4, &rhs4));
            }
        }
    }
    vec![
        ("gauss_model", out[0]),
        ("codazzi_model", out[1]),
        ("shape_model", out[2]),
        ("normal_model", out[3]),
    ]
}

/// R(X,Y)Z − c(g(Y,Z)X − g(X,Z)Y) on the induced connection.
pub fn induced_constant_curvature_residual(ig: &InducedGeometryAt, c: f64) -> f64 {
    let v = View::new(&ig.primal, &ig.values);
    let fv = &ig.values;
    let m = fv.m();
    let mut r: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            for cc in 0..m {
                let (x, y, z) = (fv.basis(a), fv.basis(b), fv.basis(cc));
                let model = scale(c, &sub(&scale(fv.g(&y, &z), &x), &scale(fv.g(&x, &z), &y)));
                r = r.max(maxdiff(&v.r(&x, &y, &z), &model));
            }
        }
    }
    r
}

/// Umbilicity data of one shape operator family: for each normal direction,
/// the fitted ρ = tr A / m, the deviation max|A − ρI| and the trace.
pub fn umbilicity(shape: &crate::tensor::Arr<f64>) -> Vec<(f64, f64, f64)> {
    let s = shape.shape();
    let (k, m) = (s[0], s[1]);
    (0..k)
        .map(|al| {
            let tr: f64 = (0..m).map(|c| shape[[al, c, c]]).sum();
            let rho = tr / m as f64;
            let mut dev: f64 = 0.0;
            for c in 0..m {
                for b in 0..m {
                    let want = if b == c { rho } else { 0.0 };
                    dev = dev.max((shape[[al, c, b]] - want).abs());
                }
            }
            (rho, dev, tr)
        })
        .collect()
}
