//! Almost product-like structures: conjugates, projectors and the model curvature.

use crate::error::{Error, Result};
use crate::linalg::{identity, matmul, metric_inverse_at, transpose};
use crate::tensor::Arr;

/// F* = g⁻¹ Fᵀ g.
pub fn derive_f_star_at(g: &Arr<f64>, f: &Arr<f64>) -> Result<Arr<f64>> {
    let ginv = metric_inverse_at(g, &[])?;
    Ok(matmul(&ginv, &matmul(&transpose(f), g)))
}

/// max |g(F e_i, e_j) − g(e_i, F* e_j)|.
pub fn conjugacy_residual(g: &Arr<f64>, f: &Arr<f64>, f_star: &Arr<f64>) -> f64 {
    let lhs = matmul(&transpose(f), g);
    let rhs = matmul(g, f_star);
    lhs.max_abs_diff(&rhs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projectors {
    pub p: Arr<f64>,
    pub q: Arr<f64>,
}

/// Tolerance for treating F as involutive when forming projectors.
pub const INVOLUTION_TOL: f64 = 1.0e-10;

/// P = (I + F)/2, Q = (I − F)/2.
pub fn projectors_at(f: &Arr<f64>) -> Result<Projectors> {
    let n = f.shape()[0];
    let id = identity(n);
    let res = matmul(f, f).max_abs_diff(&id);
    if !(res < INVOLUTION_TOL) {
        return Err(Error::NotInvolutive {
            point: Vec::new(),
            residual: res,
        });
    }
    Ok(Projectors {
        p: Arr::from_fn(&[n, n], |i| 0.5 * (id.get(i) + f.get(i))),
        q: Arr::from_fn(&[n, n], |i| 0.5 * (id.get(i) - f.get(i))),
    })
}

impl Projectors {
    /// Largest deviation among P+Q=I, P²=P, Q²=Q and F=P−Q.
    pub fn residual(&self, f: &Arr<f64>) -> f64 {
        let n = f.shape()[0];
        let id = identity(n);
        let sum = Arr::from_fn(&[n, n], |i| self.p.get(i) + self.q.get(i));
        let diff = Arr::from_fn(&[n, n], |i| self.p.get(i) - self.q.get(i));
        [
            sum.max_abs_diff(&id),
            matmul(&self.p, &self.p).max_abs_diff(&self.p),
            matmul(&self.q, &self.q).max_abs_diff(&self.q),
            diff.max_abs_diff(f),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Full model tensor `[[l, i, j, k]]`:
/// c[g(Y,Z)X − g(X,Z)Y + g(Y,FZ)FX − g(X,FZ)FY + (g(FX,Y) − g(X,FY))FZ]
/// with X = ∂i, Y = ∂j, Z = ∂k.
pub fn model_curvature_eq_o(g: &Arr<f64>, f: &Arr<f64>, c: f64) -> Arr<f64> {
    let n = g.shape()[0];
    let gf = matmul(g, f); // gf[a, b] = g(e_a, F e_b)
    Arr::from_fn(&[n, n, n, n], |x| {
        let (l, i, j, k) = (x[0], x[1], x[2], x[3]);
        let di = if l == i { 1.0 } else { 0.0 };
        let dj = if l == j { 1.0 } else { 0.0 };
        c * (g[[j, k]] * di - g[[i, k]] * dj + gf[[j, k]] * f[[l, i]] - gf[[i, k]] * f[[l, j]]
            + (gf[[j, i]] - gf[[i, j]]) * f[[l, k]])
    })
}

/// The model vector R(∂i,∂j)∂k.
pub fn model_curvature_eq_o_at(g: &Arr<f64>, f: &Arr<f64>, c: f64, ijk: (usize, usize, usize)) -> Vec<f64> {
    let m = model_curvature_eq_o(g, f, c);
    let n = g.shape()[0];
    (0..n).map(|l| m[[l, ijk.0, ijk.1, ijk.2]]).collect()
}

/// |tr F|.
pub fn trace_abs(f: &Arr<f64>) -> f64 {
    (0..f.shape()[0]).map(|i| f[[i, i]]).sum::<f64>().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1_origin() -> (Arr<f64>, Arr<f64>) {
        let g = Arr::from_fn(&[4, 4], |i| match (i[0], i[1]) {
            (0, 0) => 2.0,
            (a, b) if a == b => 1.0,
            _ => 0.0,
        });
        let f = Arr::from_fn(&[4, 4], |i| if (i[0] + 2) % 4 == i[1] { 1.0 } else { 0.0 });
        (g, f)
    }

    #[test]
    fn conjugate_at_origin() {
        let (g, f) = ex1_origin();
        let fs = derive_f_star_at(&g, &f).unwrap();
        let want = [
            [0.0, 0.0, 0.5, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((fs[[i, j]] - want[i][j]).abs() < 1e-15);
            }
        }
        assert!(conjugacy_residual(&g, &f, &fs) < 1e-12);
    }

    #[test]
    fn symmetric_structure_is_self_conjugate() {
        let g = identity(3);
        let f = Arr::from_fn(&[3, 3], |i| if i[0] == 2 - i[1] { 1.0 } else { 0.0 });
        assert_eq!(derive_f_star_at(&g, &f).unwrap(), f);
    }

    #[test]
    fn projector_cases() {
        let id = identity(3);
        let p = projectors_at(&id).unwrap();
        assert_eq!(p.p, id);
        assert_eq!(p.q, Arr::zeros(&[3, 3]));
        let minus = Arr::from_fn(&[3, 3], |i| -id.get(i));
        let p = projectors_at(&minus).unwrap();
        assert_eq!(p.p, Arr::zeros(&[3, 3]));
        assert_eq!(p.q, id);
        let (_, f) = ex1_origin();
        let p = projectors_at(&f).unwrap();
        assert!(matmul(&p.p, &p.p).max_abs_diff(&p.p) < 1e-12);
        assert!(p.residual(&f) < 1e-12);
        let bad = Arr::from_fn(&[2, 2], |i| if i == [0, 0] { 2.0 } else { 0.0 });
        assert!(projectors_at(&bad).is_err());
    }

    #[test]
    fn zero_constant_gives_zero_model() {
        let (g, f) = ex1_origin();
        assert_eq!(model_curvature_eq_o_at(&g, &f, 0.0, (0, 1, 2)), vec![0.0; 4]);
    }
}
