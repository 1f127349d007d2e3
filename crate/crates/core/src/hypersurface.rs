//! Codimension-one specialization: unit normal N, FN = ξ + μN, the φ/η
//! structure, the κ 1-form and the tangential-hypersurface identities.
//!
//! All quantities are read off the induced geometry of a codimension-one
//! immersion, so N is the single orthonormal normal field and every normal
//! vector is a scalar multiple of it.

use crate::error::{Error, Result};
use crate::geometry::ChartGeometry;
use crate::submanifold::identities::{add, maxabs, maxdiff, scale, sub, sum, Named, View};
use crate::submanifold::{Immersion, InducedGeometryAt};

/// Below this |μ − 1| the orthogonality consequence of 1 − μ² = g(ξ, ξ*) is tested.
pub const MU_ONE_TOL: f64 = 1.0e-10;
/// |μ| above this everywhere means the hypersurface is plainly not tangential.
pub const NON_TANGENTIAL_MU: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct XiData {
    pub xi: Vec<f64>,
    pub xi_star: Vec<f64>,
    /// Normal coefficient of FN.
    pub mu: f64,
    /// Normal coefficient of F*N.
    pub mu_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiData {
    /// `[[c, b]]`
    pub phi: Vec<Vec<f64>>,
    pub phi_star: Vec<Vec<f64>>,
    /// η(X) = g̃(F*X, N)
    pub eta: Vec<f64>,
    /// η*(X) = g̃(FX, N)
    pub eta_star: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaForm {
    pub kappa: Vec<f64>,
    pub kappa_star: Vec<f64>,
}

/// Hypersurface data at one domain point.
#[derive(Debug, Clone)]
pub struct HypersurfaceAt {
    pub ig: InducedGeometryAt,
}

fn require_structure(ig: &InducedGeometryAt) -> Result<()> {
    if ig.primal.blocks.is_none() || ig.dual.blocks.is_none() {
        return Err(Error::Dimension {
            field: "structure.F".into(),
            message: "hypersurface structure data needs an ambient structure".into(),
        });
    }
    Ok(())
}

impl HypersurfaceAt {
    pub fn new(ig: InducedGeometryAt) -> Result<HypersurfaceAt> {
        let k = ig.values.k();
        if k != 1 {
            return Err(Error::Codimension {
                what: "hypersurface".into(),
                codim: k,
            });
        }
        Ok(HypersurfaceAt { ig })
    }

    pub fn compute(geom: &ChartGeometry, imm: &Immersion, u: &[f64]) -> Result<HypersurfaceAt> {
        HypersurfaceAt::new(InducedGeometryAt::compute(geom, imm, u)?)
    }

    pub fn m(&self) -> usize {
        self.ig.values.m()
    }

    fn p(&self) -> View<'_> {
        View::new(&self.ig.primal, &self.ig.values)
    }

    fn d(&self) -> View<'_> {
        View::new(&self.ig.dual, &self.ig.values)
    }

    pub fn has_structure(&self) -> bool {
        self.ig.primal.blocks.is_some()
    }

    /// Unit normal in ambient components.
    pub fn normal(&self) -> Vec<f64> {
        self.ig.frame.normal[0].clone()
    }

    pub fn xi(&self) -> Result<XiData> {
        require_structure(&self.ig)?;
        let (p, d) = (self.p(), self.d());
        let n = [1.0];
        Ok(XiData {
            xi: p.t(&n),
            xi_star: d.t(&n),
            mu: p.s(&n)[0],
            mu_star: d.s(&n)[0],
        })
    }

    pub fn phi_eta(&self) -> Result<PhiData> {
        require_structure(&self.ig)?;
        let (bp, bd) = (self.ig.primal.blocks.as_ref().unwrap(), self.ig.dual.blocks.as_ref().unwrap());
        let m = self.m();
        Ok(PhiData {
            phi: (0..m).map(|c| (0..m).map(|b| bp.f[[c, b]]).collect()).collect(),
            phi_star: (0..m).map(|c| (0..m).map(|b| bd.f[[c, b]]).collect()).collect(),
            eta: (0..m).map(|b| bd.h[[0, b]]).collect(),
            eta_star: (0..m).map(|b| bp.h[[0, b]]).collect(),
        })
    }

    /// κ(e_a) = g̃(∇̃_{e_a}N, N) and κ* from ∇̃*.
    pub fn kappa(&self) -> KappaForm {
        let m = self.m();
        KappaForm {
            kappa: (0..m).map(|a| self.ig.primal.normal_conn[[a, 0, 0]]).collect(),
            kappa_star: (0..m).map(|a| self.ig.dual.normal_conn[[a, 0, 0]]).collect(),
        }
    }

    /// A_N X
    pub fn a_n(&self, x: &[f64]) -> Vec<f64> {
        self.p().shape(&[1.0], x)
    }

    /// A*_N X
    pub fn a_n_star(&self, x: &[f64]) -> Vec<f64> {
        self.d().shape(&[1.0], x)
    }

    /// 'σ(X, Y), the N-coefficient of σ.
    pub fn sigma_n(&self, x: &[f64], y: &[f64]) -> f64 {
        self.p().sigma(x, y)[0]
    }

    pub fn sigma_n_star(&self, x: &[f64], y: &[f64]) -> f64 {
        self.d().sigma(x, y)[0]
    }

    /// ∇_X ξ, from the covariant derivative of the t block:
    /// ∇_X(tN) = (∇̄_X t)N + t(D_X N).
    pub fn nabla_xi(&self, x: &[f64]) -> Vec<f64> {
        let p = self.p();
        let n = [1.0];
        add(&p.nbar_t(x, &n), &p.t(&p.d(x, &n)))
    }

    /// ∇*_X ξ*
    pub fn nabla_xi_star(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d();
        let n = [1.0];
        add(&d.nbar_t(x, &n), &d.t(&d.d(x, &n)))
    }

    /// (∇_X φ)Y
    pub fn nabla_phi(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.p().nabla_f(x, y)
    }

    /// (∇*_X φ*)Y
    pub fn nabla_phi_star(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.d().nabla_f(x, y)
    }

    /// (∇̄_X A)_N Y = ∇_X(A_N Y) − A_{∇̃_X N}Y − A_N(∇_X Y), where only the
    /// normal part κ(X)N of ∇̃_X N can enter A.
    pub fn nbar_a(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.p().nabla_shape(x, &[1.0], y)
    }

    pub fn nbar_a_star(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.d().nabla_shape(x, &[1.0], y)
    }

    /// dκ(X, Y) = X κ(Y) − Y κ(X) on coordinate frame fields (brackets vanish).
    pub fn dkappa(&self, x: &[f64], y: &[f64]) -> f64 {
        self.p().rperp(x, y, &[1.0])[0]
    }

}

/// FN = ξ + μN, F*N = ξ* + μN at a domain point.
pub fn xi_mu_at(geom: &ChartGeometry, imm: &Immersion, u: &[f64]) -> Result<XiData> {
    HypersurfaceAt::compute(geom, imm, u)?.xi()
}

pub fn phi_eta_at(geom: &ChartGeometry, imm: &Immersion, u: &[f64]) -> Result<PhiData> {
    HypersurfaceAt::compute(geom, imm, u)?.phi_eta()
}

pub fn kappa_at(geom: &ChartGeometry, imm: &Immersion, u: &[f64]) -> Result<KappaForm> {
    Ok(HypersurfaceAt::compute(geom, imm, u)?.kappa())
}

/// μ consistency, 1 − μ² = g(ξ, ξ*), and the μ = 1 orthogonality consequence.
pub fn xi_mu_residuals(hs: &HypersurfaceAt) -> Result<Named> {
    let xd = hs.xi()?;
    let fv = &hs.ig.values;
    let gxx = fv.g(&xd.xi, &xd.xi_star);
    let ortho = if (xd.mu - 1.0).abs() < MU_ONE_TOL { gxx.abs() } else { 0.0 };
    Ok(vec![
        ("mu_equals_mu_star", (xd.mu - xd.mu_star).abs()),
        ("one_minus_mu2", (1.0 - xd.mu * xd.mu - gxx).abs()),
        ("mu_one_orthogonal", ortho),
    ])
}

/// Identities of φ, φ*, ξ, ξ*, η, η* that hold on tangential hypersurfaces,
/// plus the pairings g(φX,Y) = g(X,φ*Y) and g(φX,φ*Y) = g(X,Y) − η*(X)η(Y).
pub fn phi_eta_residuals(hs: &HypersurfaceAt) -> Result<Named> {
    let xd = hs.xi()?;
    let (p, d) = (hs.p(), hs.d());
    let fv = &hs.ig.values;
    let m = hs.m();
    let (eta, eta_s) = (|x: &[f64]| d.h(x)[0], |x: &[f64]| p.h(x)[0]);
    let mut r = [0.0f64; 12];
    for a in 0..m {
        let x = fv.basis(a);
        // φ²X = X − η*(X)ξ ; η*(φX) = 0
        r[0] = r[0].max(maxdiff(&p.f(&p.f(&x)), &sub(&x, &scale(eta_s(&x), &xd.xi))));
        r[1] = r[1].max(eta_s(&p.f(&x)).abs());
        r[2] = r[2].max(maxdiff(&d.f(&d.f(&x)), &sub(&x, &scale(eta(&x), &xd.xi_star))));
        r[3] = r[3].max(eta(&d.f(&x)).abs());
        r[6] = r[6].max((eta_s(&x) - fv.g(&x, &xd.xi_star)).abs());
        r[7] = r[7].max((eta(&x) - fv.g(&x, &xd.xi)).abs());
        for b in 0..m {
            let y = fv.basis(b);
            r[8] = r[8].max((fv.g(&p.f(&x), &y) - fv.g(&x, &d.f(&y))).abs());
            let rhs = fv.g(&x, &y) - eta_s(&x) * eta(&y);
            r[9] = r[9].max((fv.g(&p.f(&x), &d.f(&y)) - rhs).abs());
        }
    }
    r[4] = maxabs(&p.f(&xd.xi));
    r[5] = maxabs(&d.f(&xd.xi_star));
    r[10] = (eta(&xd.xi_star) - 1.0).abs();
    r[11] = (eta_s(&xd.xi) - 1.0).abs();
    Ok(vec![
        ("phi2", r[0]),
        ("eta_star_phi", r[1]),
        ("phi_star2", r[2]),
        ("eta_phi_star", r[3]),
        ("phi_xi", r[4]),
        ("phi_star_xi_star", r[5]),
        ("eta_star_is_g_xi_star", r[6]),
        ("eta_is_g_xi", r[7]),
        ("g_phi_phi_star", r[8]),
        ("g_phi_x_phi_star_y", r[9]),
        ("eta_xi_star", r[10]),
        ("eta_star_xi", r[11]),
    ])
}

/// κ + κ* = 0 and the hypersurface forms 'σ(X,Y) = g(A*_N X,Y), 'σ*(X,Y) = g(A_N X,Y).
pub fn kappa_residuals(hs: &HypersurfaceAt) -> Named {
    let k = hs.kappa();
    let fv = &hs.ig.values;
    let m = hs.m();
    let sum_r = k.kappa.iter().zip(&k.kappa_star).fold(0.0f64, |a, (x, y)| a.max((x + y).abs()));
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for a in 0..m {
        for b in 0..m {
            let (x, y) = (fv.basis(a), fv.basis(b));
            s1 = s1.max((hs.sigma_n(&x, &y) - fv.g(&hs.a_n_star(&x), &y)).abs());
            s2 = s2.max((hs.sigma_n_star(&x, &y) - fv.g(&hs.a_n(&x), &y)).abs());
        }
    }
    vec![("kappa_plus_kappa_star", sum_r), ("sigma_n", s1), ("sigma_n_star", s2)]
}

/// ∇ξ, ∇*ξ*, the A_N/A*_N cross relations and the two κ formulas.
pub fn prop5a_residuals(hs: &HypersurfaceAt) -> Result<Named> {
    let xd = hs.xi()?;
    let (p, d) = (hs.p(), hs.d());
    let fv = &hs.ig.values;
    let kf = hs.kappa();
    let m = hs.m();
    let (eta, eta_s) = (|x: &[f64]| d.h(x)[0], |x: &[f64]| p.h(x)[0]);
    let mut r = [0.0f64; 5];
    for a in 0..m {
        let x = fv.basis(a);
        let k = kf.kappa[a];
        let (an, ans) = (hs.a_n(&x), hs.a_n_star(&x));
        let nxi = hs.nabla_xi(&x);
        let nxis = hs.nabla_xi_star(&x);
        let rhs32 = add(&scale(-1.0, &p.f(&an)), &scale(k, &xd.xi));
        r[0] = r[0].max(maxdiff(&nxi, &rhs32));
        let rhs34 = sub(&scale(-1.0, &d.f(&ans)), &scale(k, &xd.xi_star));
        r[1] = r[1].max(maxdiff(&nxis, &rhs34));
        r[2] = r[2].max((eta(&ans) + eta_s(&an)).abs());
        r[4] = r[4].max((k - eta_s(&nxi)).abs()).max((k + eta(&nxis)).abs());
    }
    r[3] = maxabs(&add(&hs.a_n(&xd.xi_star), &hs.a_n_star(&xd.xi)));
    Ok(vec![
        ("nabla_xi", r[0]),
        ("nabla_star_xi_star", r[1]),
        ("eta_a_star_plus_eta_star_a", r[2]),
        ("a_xi_star_plus_a_star_xi", r[3]),
        ("kappa_formulas", r[4]),
    ])
}

/// (∇_X φ)Y = g(A*_N X,Y)ξ + η*(Y)A_N X and the starred form.
pub fn prop8a_residuals(hs: &HypersurfaceAt) -> Result<Named> {
    let xd = hs.xi()?;
    let (p, d) = (hs.p(), hs.d());
    let fv = &hs.ig.values;
    let m = hs.m();
    let mut r = [0.0f64; 2];
    for a in 0..m {
        for b in 0..m {
            let (x, y) = (fv.basis(a), fv.basis(b));
            let rhs = add(
                &scale(fv.g(&hs.a_n_star(&x), &y), &xd.xi),
                &scale(p.h(&y)[0], &hs.a_n(&x)),
            );
            r[0] = r[0].max(maxdiff(&hs.nabla_phi(&x, &y), &rhs));
            let rhs = add(
                &scale(fv.g(&hs.a_n(&x), &y), &xd.xi_star),
                &scale(d.h(&y)[0], &hs.a_n_star(&x)),
            );
            r[1] = r[1].max(maxdiff(&hs.nabla_phi_star(&x, &y), &rhs));
        }
    }
    Ok(vec![("nabla_phi", r[0]), ("nabla_star_phi_star", r[1])])
}

/// g([A_N, A*_N]X, Y) − dκ(X, Y)
fn bracket(hs: &HypersurfaceAt, x: &[f64], y: &[f64]) -> f64 {
    let fv = &hs.ig.values;
    let comm = sub(&hs.a_n(&hs.a_n_star(x)), &hs.a_n_star(&hs.a_n(x)));
    fv.g(&comm, y) - hs.dkappa(x, y)
}

/// One family's view of the shape data: its own A_N on X and Y, the other
/// family's, both bar derivatives and its ξ.
struct Side<'a> {
    fam: &'a View<'a>,
    ax: &'a [f64],
    ay: &'a [f64],
    ox: &'a [f64],
    oy: &'a [f64],
    nx: &'a [f64],
    ny: &'a [f64],
    mx: &'a [f64],
    my: &'a [f64],
    xi: &'a [f64],
}

/// Tangent part of R̃(X,Y)FZ − F R̃(X,Y)Z written through the hypersurface data.
fn phi_commutation(
    fv: &crate::submanifold::FrameValues,
    s: &Side,
    eta_z: f64,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> f64 {
    let fam = s.fam;
    let fz = fam.f(z);
    let lhs = sum(&[
        fam.r(x, y, &fz),
        scale(-fv.g(s.oy, &fz), s.ax),
        scale(fv.g(s.ox, &fz), s.ay),
        scale(-eta_z, &sub(s.nx, s.ny)),
    ]);
    let rhs = sum(&[
        fam.f(&fam.r(x, y, z)),
        scale(-fv.g(s.oy, z), &fam.f(s.ax)),
        scale(fv.g(s.ox, z), &fam.f(s.ay)),
        scale(fv.g(s.mx, z) - fv.g(s.my, z), s.xi),
    ]);
    maxdiff(&lhs, &rhs)
}

/// Curvature of ξ and ξ*, the four ambient curvature decompositions, the
/// φ-commutation forms and the mixed η relation.
pub fn curvature_xi_residuals(hs: &HypersurfaceAt) -> Result<Named> {
    let xd = hs.xi()?;
    let (p, d) = (hs.p(), hs.d());
    let fv = &hs.ig.values;
    let m = hs.m();
    let (eta, eta_s) = (|x: &[f64]| d.h(x)[0], |x: &[f64]| p.h(x)[0]);
    let neg = |v: Vec<f64>| scale(-1.0, &v);
    let n = [1.0];
    let mut r = [0.0f64; 9];
    for a in 0..m {
        for b in 0..m {
            let (x, y) = (fv.basis(a), fv.basis(b));
            let br = bracket(hs, &x, &y);
            let (nxy, nyx) = (hs.nbar_a(&x, &y), hs.nbar_a(&y, &x));
            let (sxy, syx) = (hs.nbar_a_star(&x, &y), hs.nbar_a_star(&y, &x));
            let (anx, any) = (hs.a_n(&x), hs.a_n(&y));
            let (asx, asy) = (hs.a_n_star(&x), hs.a_n_star(&y));

            // R(X,Y)ξ
            let rhs = sum(&[
                neg(p.f(&nxy)),
                p.f(&nyx),
                scale(-eta_s(&any), &anx),
                scale(eta_s(&anx), &any),
                scale(-br, &xd.xi),
            ]);
            r[0] = r[0].max(maxdiff(&p.r(&x, &y, &xd.xi), &rhs));
            // R*(X,Y)ξ*
            let rhs = sum(&[
                neg(d.f(&sxy)),
                d.f(&syx),
                scale(-eta(&asy), &asx),
                scale(eta(&asx), &asy),
                scale(br, &xd.xi_star),
            ]);
            r[1] = r[1].max(maxdiff(&d.r(&x, &y, &xd.xi_star), &rhs));

            // R̃(X,Y)N and R̃*(X,Y)N
            let (tan, nor) = p.ambient_r_normal(&x, &y, &n);
            r[3] = r[3].max(maxdiff(&tan, &sub(&nyx, &nxy))).max((nor[0] + br).abs());
            let (tan, nor) = d.ambient_r_normal(&x, &y, &n);
            r[5] = r[5].max(maxdiff(&tan, &sub(&syx, &sxy))).max((nor[0] - br).abs());

            // mixed η relation
            let lhs = eta(&sxy) - eta(&syx);
            let rhs = -eta_s(&nxy) + eta_s(&nyx);
            r[6] = r[6].max((lhs - rhs).abs());

            for c in 0..m {
                let z = fv.basis(c);
                // R̃(X,Y)Z
                let (tan, nor) = p.ambient_r_tangent(&x, &y, &z);
                let rhs = sum(&[
                    p.r(&x, &y, &z),
                    scale(-fv.g(&asy, &z), &anx),
                    scale(fv.g(&asx, &z), &any),
                ]);
                let nrhs = fv.g(&sxy, &z) - fv.g(&syx, &z);
                r[2] = r[2].max(maxdiff(&tan, &rhs)).max((nor[0] - nrhs).abs());
                // R̃*(X,Y)Z
                let (tan, nor) = d.ambient_r_tangent(&x, &y, &z);
                let rhs = sum(&[
                    d.r(&x, &y, &z),
                    scale(-fv.g(&any, &z), &asx),
                    scale(fv.g(&anx, &z), &asy),
                ]);
                let nrhs = fv.g(&nxy, &z) - fv.g(&nyx, &z);
                r[4] = r[4].max(maxdiff(&tan, &rhs)).max((nor[0] - nrhs).abs());

                // φ commutation with R̃, tangent part, both families
                let pa = Side { fam: &p, ax: &anx, ay: &any, ox: &asx, oy: &asy, nx: &nxy, ny: &nyx, mx: &sxy, my: &syx, xi: &xd.xi };
                r[7] = r[7].max(phi_commutation(fv, &pa, eta_s(&z), &x, &y, &z));
                let da = Side { fam: &d, ax: &asx, ay: &asy, ox: &anx, oy: &any, nx: &sxy, ny: &syx, mx: &nxy, my: &nyx, xi: &xd.xi_star };
                r[8] = r[8].max(phi_commutation(fv, &da, eta(&z), &x, &y, &z));
            }
        }
    }
    Ok(vec![
        ("r_xi", r[0]),
        ("r_star_xi_star", r[1]),
        ("ambient_r_z", r[2]),
        ("ambient_r_n", r[3]),
        ("ambient_r_star_z", r[4]),
        ("ambient_r_star_n", r[5]),
        ("mixed_eta", r[6]),
        ("phi_commutation", r[7]),
        ("phi_star_commutation", r[8]),
    ])
}

/// Model-curvature consequences on a tangential hypersurface with constant
/// `c`. Returns the residuals of the four identities together with the
/// residual of a variant of the first one whose left side applies R to φZ
/// instead of Z. Only the four identities enter the verdict.
pub fn tk_residuals(hs: &HypersurfaceAt, c: f64) -> Result<(Named, f64)> {
    let xd = hs.xi()?;
    let (p, d) = (hs.p(), hs.d());
    let fv = &hs.ig.values;
    let m = hs.m();
    let (eta, eta_s) = (|x: &[f64]| d.h(x)[0], |x: &[f64]| p.h(x)[0]);
    let mut r = [0.0f64; 4];
    let mut phi_z: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let (x, y) = (fv.basis(a), fv.basis(b));
            let (fx, fy) = (p.f(&x), p.f(&y));
            let skew = fv.g(&fx, &y) - fv.g(&x, &fy);
            let (anx, any) = (hs.a_n(&x), hs.a_n(&y));
            let (asx, asy) = (hs.a_n_star(&x), hs.a_n_star(&y));
            for cc in 0..m {
                let z = fv.basis(cc);
                let fz = p.f(&z);
                let model = scale(
                    c,
                    &sum(&[
                        scale(fv.g(&y, &z), &x),
                        scale(-fv.g(&x, &z), &y),
                        scale(fv.g(&y, &fz), &fx),
                        scale(-fv.g(&x, &fz), &fy),
                        scale(skew, &fz),
                    ]),
                );
                let rhs = sum(&[model, scale(fv.g(&asy, &z), &anx), scale(-fv.g(&asx, &z), &any)]);
                r[0] = r[0].max(maxdiff(&p.r(&x, &y, &z), &rhs));
                phi_z = phi_z.max(maxdiff(&p.r(&x, &y, &fz), &rhs));

                let lhs = fv.g(&hs.nbar_a_star(&x, &y), &z) - fv.g(&hs.nbar_a_star(&y, &x), &z);
                let rhs = c
                    * (eta_s(&x) * fv.g(&y, &fz) - eta_s(&y) * fv.g(&x, &fz) + eta_s(&z) * skew);
                r[1] = r[1].max((lhs - rhs).abs());
            }
            let lhs = sub(&hs.nbar_a(&x, &y), &hs.nbar_a(&y, &x));
            let rhs = scale(
                c,
                &sum(&[scale(eta(&x), &fy), scale(-eta(&y), &fx), scale(-skew, &xd.xi)]),
            );
            r[2] = r[2].max(maxdiff(&lhs, &rhs));
            let rhs = c * (eta(&x) * eta_s(&y) - eta(&y) * eta_s(&x));
            r[3] = r[3].max((bracket(hs, &x, &y) - rhs).abs());
        }
    }
    Ok((
        vec![("tk1", r[0]), ("tk2", r[1]), ("tk3", r[2]), ("tk4", r[3])],
        phi_z,
    ))
}

/// max |'σ| over the frame.
pub fn sigma_n_max(hs: &HypersurfaceAt) -> f64 {
    hs.ig.primal.sigma.max_abs()
}

/// The almost para contact-like axioms and the metric compatibility relation.
pub fn para_contact_residuals(hs: &HypersurfaceAt) -> Result<Named> {
    let xd = hs.xi()?;
    let (p, d) = (hs.p(), hs.d());
    let fv = &hs.ig.values;
    let m = hs.m();
    let (eta, eta_s) = (|x: &[f64]| d.h(x)[0], |x: &[f64]| p.h(x)[0]);
    let mut r = [0.0f64; 9];
    for a in 0..m {
        let x = fv.basis(a);
        r[0] = r[0].max(maxdiff(&p.f(&p.f(&x)), &sub(&x, &scale(eta_s(&x), &xd.xi))));
        r[3] = r[3].max(eta(&d.f(&x)).abs());
        r[4] = r[4].max(maxdiff(&d.f(&d.f(&x)), &sub(&x, &scale(eta(&x), &xd.xi_star))));
        r[7] = r[7].max(eta_s(&p.f(&x)).abs());
        for b in 0..m {
            let y = fv.basis(b);
            let rhs = fv.g(&x, &y) - eta_s(&x) * eta(&y);
            r[8] = r[8].max((fv.g(&p.f(&x), &d.f(&y)) - rhs).abs());
        }
    }
    r[1] = maxabs(&p.f(&xd.xi));
    r[2] = (eta(&xd.xi_star) - 1.0).abs();
    r[5] = maxabs(&d.f(&xd.xi_star));
    r[6] = (eta_s(&xd.xi) - 1.0).abs();
    Ok(vec![
        ("phi2", r[0]),
        ("phi_xi", r[1]),
        ("eta_xi_star", r[2]),
        ("eta_phi_star", r[3]),
        ("phi_star2", r[4]),
        ("phi_star_xi_star", r[5]),
        ("eta_star_xi", r[6]),
        ("eta_star_phi", r[7]),
        ("metric", r[8]),
    ])
}
