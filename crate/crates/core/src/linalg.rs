//! Dense linear algebra on `f64` and on Taylor-valued matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::taylor::Taylor;
use crate::tensor::Arr;

/// Condition-number threshold beyond which a metric counts as singular.
pub const SINGULAR_CONDITION: f64 = 1.0e12;

pub fn to_dmatrix(a: &Arr<f64>) -> DMatrix<f64> {
    let s = a.shape();
    DMatrix::from_fn(s[0], s[1], |i, j| a[[i, j]])
}

pub fn from_dmatrix(m: &DMatrix<f64>) -> Arr<f64> {
    Arr::from_fn(&[m.nrows(), m.ncols()], |i| m[(i[0], i[1])])
}

pub fn singular_values(a: &Arr<f64>) -> Vec<f64> {
    let sv = to_dmatrix(a).singular_values();
    let mut v: Vec<f64> = sv.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// 2-norm condition number (infinite when singular).
pub fn condition_number(a: &Arr<f64>) -> f64 {
    let sv = singular_values(a);
    let (hi, lo) = (sv[0], *sv.last().unwrap_or(&0.0));
    if lo == 0.0 || !lo.is_finite() {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Inverse of a metric matrix, refusing ill-conditioned input.
pub fn metric_inverse_at(g: &Arr<f64>, point: &[f64]) -> Result<Arr<f64>> {
    let cond = condition_number(g);
    if !(cond <= SINGULAR_CONDITION) {
        return Err(Error::SingularMetric {
            point: point.to_vec(),
            condition: cond,
        });
    }
    let inv = to_dmatrix(g).try_inverse().ok_or(Error::SingularMetric {
        point: point.to_vec(),
        condition: cond,
    })?;
    let n = g.shape()[0];
    // symmetrize: the inverse of a symmetric matrix is symmetric
    Ok(Arr::from_fn(&[n, n], |i| {
        0.5 * (inv[(i[0], i[1])] + inv[(i[1], i[0])])
    }))
}

pub fn matmul(a: &Arr<f64>, b: &Arr<f64>) -> Arr<f64> {
    let (n, k, m) = (a.shape()[0], a.shape()[1], b.shape()[1]);
    assert_eq!(k, b.shape()[0]);
    Arr::from_fn(&[n, m], |i| (0..k).map(|l| a[[i[0], l]] * b[[l, i[1]]]).sum())
}

pub fn transpose(a: &Arr<f64>) -> Arr<f64> {
    Arr::from_fn(&[a.shape()[1], a.shape()[0]], |i| a[[i[1], i[0]]])
}

pub fn identity(n: usize) -> Arr<f64> {
    Arr::from_fn(&[n, n], |i| if i[0] == i[1] { 1.0 } else { 0.0 })
}

pub fn matvec(a: &Arr<f64>, v: &[f64]) -> Vec<f64> {
    let (n, k) = (a.shape()[0], a.shape()[1]);
    (0..n).map(|i| (0..k).map(|j| a[[i, j]] * v[j]).sum()).collect()
}

pub fn tmatmul(a: &Arr<Taylor>, b: &Arr<Taylor>) -> Arr<Taylor> {
    let (n, k, m) = (a.shape()[0], a.shape()[1], b.shape()[1]);
    assert_eq!(k, b.shape()[0]);
    Arr::from_fn(&[n, m], |i| {
        let mut acc = a[[i[0], 0]].mul_ref(&b[[0, i[1]]]);
        for l in 1..k {
            acc += a[[i[0], l]].mul_ref(&b[[l, i[1]]]);
        }
        acc
    })
}

pub fn ttranspose(a: &Arr<Taylor>) -> Arr<Taylor> {
    Arr::from_fn(&[a.shape()[1], a.shape()[0]], |i| a[[i[1], i[0]]].clone())
}

/// Inverse of a Taylor-valued square matrix by Gauss-Jordan elimination with
/// partial pivoting on the constant terms.
pub fn tinverse(a: &Arr<Taylor>) -> Option<Arr<Taylor>> {
    let n = a.shape()[0];
    let one = a[[0, 0]].lift(1.0);
    let zero = a[[0, 0]].lift(0.0);
    let mut m: Vec<Vec<Taylor>> = (0..n)
        .map(|i| (0..n).map(|j| a[[i, j]].clone()).collect())
        .collect();
    let mut inv: Vec<Vec<Taylor>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| {
            m[x][col]
                .value()
                .abs()
                .total_cmp(&m[y][col].value().abs())
        })?;
        if m[piv][col].value() == 0.0 {
            return None;
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let r = m[col][col].recip();
        for j in 0..n {
            m[col][j] = m[col][j].mul_ref(&r);
            inv[col][j] = inv[col][j].mul_ref(&r);
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[i][col].clone();
            if f.max_abs_coeff() == 0.0 {
                continue;
            }
            for j in 0..n {
                let a = f.mul_ref(&m[col][j]);
                m[i][j] -= a;
                let b = f.mul_ref(&inv[col][j]);
                inv[i][j] -= b;
            }
        }
    }
    Some(Arr::from_fn(&[n, n], |i| inv[i[0]][i[1]].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_inverse() {
        let g = Arr::from_fn(&[4, 4], |i| {
            if i[0] == i[1] {
                if i[0] == 0 {
                    2.0
                } else {
                    1.0
                }
            } else {
                0.0
            }
        });
        let inv = metric_inverse_at(&g, &[0.0; 4]).unwrap();
        assert_eq!(inv[[0, 0]], 0.5);
        assert_eq!(inv[[1, 1]], 1.0);
        assert_eq!(metric_inverse_at(&identity(3), &[0.0]).unwrap(), identity(3));
    }

    #[test]
    fn singular_metric_is_rejected() {
        let g = Arr::from_fn(&[2, 2], |i| if i == [0, 0] { 1.0 } else { 0.0 });
        let err = metric_inverse_at(&g, &[0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::SingularMetric { .. }));
    }

    #[test]
    fn taylor_inverse_matches_derivative_of_inverse() {
        // A(x) = [[2 + x, x], [x, 1]]; d/dx A^-1 = -A^-1 A' A^-1
        let x = Taylor::variable(1, 2, 0, 0.3);
        let one = x.lift(1.0);
        let two = x.lift(2.0);
        let a = Arr::from_fn(&[2, 2], |i| match (i[0], i[1]) {
            (0, 0) => &two + &x,
            (1, 1) => one.clone(),
            _ => x.clone(),
        });
        let inv = tinverse(&a).unwrap();
        let prod = tmatmul(&a, &inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                let c = prod[[i, j]].coeffs();
                assert!((c[0] - want).abs() < 1e-14);
                assert!(c[1..].iter().all(|v| v.abs() < 1e-13));
            }
        }
    }
}
