//! Pointwise residuals of the ambient statistical structure and of F.

use crate::geometry::{covariant_derivative_tensor11, dual_coefficients, nabla_g_at, AmbientJets, ConnectionKind};
use crate::linalg::{identity, matmul};
use crate::product::{conjugacy_residual, model_curvature_eq_o, projectors_at};
use crate::submanifold::identities::Named;
use crate::error::Error;
use crate::tensor::Arr;

/// Torsion and the Codazzi symmetry of C = ∇g.
pub fn statistical(aj: &AmbientJets) -> Named {
    let n = aj.dim();
    let gamma = aj.connection(ConnectionKind::Primal).gamma;
    let c = nabla_g_at(&aj.metric(), &aj.metric_gradient(), &gamma);
    let mut torsion: f64 = 0.0;
    let mut codazzi: f64 = 0.0;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                torsion = torsion.max((gamma[[k, i, j]] - gamma[[k, j, i]]).abs());
                codazzi = codazzi.max((c[[k, i, j]] - c[[i, k, j]]).abs());
            }
        }
    }
    vec![("torsion", torsion), ("codazzi", codazzi)]
}

/// Γ** recomputed from point values of g, ∂g and Γ*, against Γ.
pub fn dual_involution(aj: &AmbientJets) -> Named {
    let gamma = aj.connection(ConnectionKind::Primal).gamma;
    let dual = aj.connection(ConnectionKind::Dual).gamma;
    let back = dual_coefficients(&aj.metric(), &aj.metric_inverse(), &aj.metric_gradient(), &dual);
    vec![("dual_of_dual", back.max_abs_diff(&gamma))]
}

pub fn mean_connection_metric(aj: &AmbientJets) -> Named {
    let mean = aj.connection(ConnectionKind::Mean).gamma;
    let c = nabla_g_at(&aj.metric(), &aj.metric_gradient(), &mean);
    vec![("mean_nabla_g", c.max_abs())]
}

/// |g_lm R^m_ijk + g_km R*^m_ijl| with the given pair of curvature kinds.
pub fn curvature_duality_with(aj: &AmbientJets, a: ConnectionKind, b: ConnectionKind) -> f64 {
    let n = aj.dim();
    let g = aj.metric();
    let r = aj.curvature(a).r;
    let rs = aj.curvature(b).r;
    let mut out: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = 0.0;
                    for m in 0..n {
                        acc += g[[l, m]] * r[[m, i, j, k]] + g[[k, m]] * rs[[m, i, j, l]];
                    }
                    out = out.max(acc.abs());
                }
            }
        }
    }
    out
}

pub fn curvature_duality(aj: &AmbientJets) -> Named {
    vec![("lowered_duality", curvature_duality_with(aj, ConnectionKind::Primal, ConnectionKind::Dual))]
}

fn bianchi_of(r: &Arr<f64>) -> f64 {
    let n = r.shape()[0];
    let mut out: f64 = 0.0;
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out = out.max((r[[l, i, j, k]] + r[[l, j, k, i]] + r[[l, k, i, j]]).abs());
                }
            }
        }
    }
    out
}

pub fn bianchi(aj: &AmbientJets) -> Named {
    vec![
        ("first_bianchi", bianchi_of(&aj.curvature(ConnectionKind::Primal).r)),
        ("first_bianchi_star", bianchi_of(&aj.curvature(ConnectionKind::Dual).r)),
    ]
}

/// max|F − I| and max|F + I| at a point.
pub fn distance_to_identity(f: &Arr<f64>) -> (f64, f64) {
    let n = f.shape()[0];
    let id = identity(n);
    let minus = Arr::from_fn(&[n, n], |i| -id.get(i));
    (f.max_abs_diff(&id), f.max_abs_diff(&minus))
}

pub fn almost_product_like(aj: &AmbientJets) -> Option<Named> {
    let f = aj.structure_values()?;
    let fs = aj.conjugate_values()?;
    let g = aj.metric();
    let n = aj.dim();
    let id = identity(n);
    let mut compat: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = -g[[i, j]];
            for a in 0..n {
                for b in 0..n {
                    acc += f[[a, i]] * g[[a, b]] * fs[[b, j]];
                }
            }
            compat = compat.max(acc.abs());
        }
    }
    Some(vec![
        ("f_squared", matmul(&f, &f).max_abs_diff(&id)),
        ("f_star_squared", matmul(&fs, &fs).max_abs_diff(&id)),
        ("g_fx_fstar_y", compat),
        ("conjugacy", conjugacy_residual(&g, &f, &fs)),
    ])
}

/// ∇F and ∇*F*, both as `[[k, i, j]]`.
pub fn parallel_tensors(aj: &AmbientJets) -> Option<(Arr<f64>, Arr<f64>)> {
    let f = aj.f.as_ref()?;
    let fs = aj.f_star.as_ref()?;
    Some((
        covariant_derivative_tensor11(&aj.connection(ConnectionKind::Primal).gamma, f),
        covariant_derivative_tensor11(&aj.connection(ConnectionKind::Dual).gamma, fs),
    ))
}

pub fn nabla_f(aj: &AmbientJets) -> Option<Named> {
    let (nf, nfs) = parallel_tensors(aj)?;
    Some(vec![("nabla_F", nf.max_abs()), ("nabla_star_F_star", nfs.max_abs())])
}

/// g((∇_X F)Y, Z) − g(Y, (∇*_X F*)Z).
pub fn structure_pairing(aj: &AmbientJets) -> Option<Named> {
    let (nf, nfs) = parallel_tensors(aj)?;
    let g = aj.metric();
    let n = aj.dim();
    let mut out: f64 = 0.0;
    for k in 0..n {
        for j in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += nf[[k, i, j]] * g[[i, l]] - g[[j, i]] * nfs[[k, i, l]];
                }
                out = out.max(acc.abs());
            }
        }
    }
    Some(vec![("covariant_pairing", out)])
}

pub fn projectors(aj: &AmbientJets) -> Option<Named> {
    let f = aj.structure_values()?;
    let r = match projectors_at(&f) {
        Ok(p) => p.residual(&f),
        Err(Error::NotInvolutive { residual, .. }) => residual,
        Err(_) => f64::NAN,
    };
    Some(vec![("projector_identities", r)])
}

/// R against the product-curvature model with F, and R* against it with F*.
pub fn eq_o(aj: &AmbientJets, c: f64) -> Option<Named> {
    let f = aj.structure_values()?;
    let fs = aj.conjugate_values()?;
    let g = aj.metric();
    let r = aj.curvature(ConnectionKind::Primal).r;
    let rs = aj.curvature(ConnectionKind::Dual).r;
    Some(vec![
        ("model", r.max_abs_diff(&model_curvature_eq_o(&g, &f, c))),
        ("model_star", rs.max_abs_diff(&model_curvature_eq_o(&g, &fs, c))),
    ])
}

/// |tr F| − n when positive.
pub fn trace_excess(aj: &AmbientJets) -> Option<f64> {
    let f = aj.structure_values()?;
    let n = aj.dim();
    let tr: f64 = (0..n).map(|i| f[[i, i]]).sum();
    Some((tr.abs() - n as f64).max(0.0))
}
