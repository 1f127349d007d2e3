//! Truncated multivariate Taylor polynomials.
//!
//! A [`Taylor`] holds the coefficients of a polynomial in `nvars` variables
//! truncated at total degree `order`, expanded around some base point. Every
//! arithmetic operation is exact up to the truncation degree, so derivatives
//! read off the coefficients carry rounding error only.
//!
//! Constant terms are always computed with the same `f64` operation a plain
//! scalar evaluation would use, so the value of a jet is bit-identical to the
//! scalar result.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

/// Monomial table shared by all polynomials with the same shape.
#[derive(Debug)]
pub struct Basis {
    nvars: usize,
    order: usize,
    exps: Vec<Vec<u8>>,
    degree: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    // (i, j, k): monomial i times monomial j is monomial k, k != 0
    products: Vec<(u32, u32, u32)>,
}

impl Basis {
    fn build(nvars: usize, order: usize) -> Basis {
        let mut exps = Vec::new();
        for d in 0..=order {
            let mut cur = vec![0u8; nvars];
            push_degree(&mut exps, &mut cur, 0, d);
        }
        let degree: Vec<usize> = exps
            .iter()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .collect();
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let mut products = Vec::new();
        for i in 0..exps.len() {
            for j in 0..exps.len() {
                if degree[i] + degree[j] > order || (i == 0 && j == 0) {
                    continue;
                }
                let e: Vec<u8> = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                products.push((i as u32, j as u32, index[&e] as u32));
            }
        }
        Basis {
            nvars,
            order,
            exps,
            degree,
            index,
            products,
        }
    }

    /// Shared basis for the given shape.
    pub fn get(nvars: usize, order: usize) -> Arc<Basis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Basis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(Basis::build(nvars, order)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Index of the monomial with the given exponents, if present.
    pub fn position(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    pub fn exponents(&self, k: usize) -> &[u8] {
        &self.exps[k]
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, var: usize, left: usize) {
    if var + 1 == cur.len() {
        cur[var] = left as u8;
        out.push(cur.clone());
        cur[var] = 0;
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=left).rev() {
        cur[var] = k as u8;
        push_degree(out, cur, var + 1, left - k);
    }
    cur[var] = 0;
}

/// Truncated Taylor polynomial.
#[derive(Clone)]
pub struct Taylor {
    basis: Arc<Basis>,
    c: Vec<f64>,
}

impl fmt::Debug for Taylor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Taylor(n={}, order={}, {:?})",
            self.basis.nvars, self.basis.order, self.c
        )
    }
}

impl Taylor {
    pub fn constant(nvars: usize, order: usize, v: f64) -> Taylor {
        let basis = Basis::get(nvars, order);
        let mut c = vec![0.0; basis.len()];
        c[0] = v;
        Taylor { basis, c }
    }

    /// The coordinate function `x_var` expanded around `value`.
    pub fn variable(nvars: usize, order: usize, var: usize, value: f64) -> Taylor {
        let mut t = Taylor::constant(nvars, order, value);
        if order >= 1 {
            let mut e = vec![0u8; nvars];
            e[var] = 1;
            let k = t.basis.index[&e];
            t.c[k] = 1.0;
        }
        t
    }

    /// The coordinate functions expanded around `point`.
    pub fn variables(point: &[f64], order: usize) -> Vec<Taylor> {
        let n = point.len();
        (0..n).map(|i| Taylor::variable(n, order, i, point[i])).collect()
    }

    pub fn from_coeffs(basis: Arc<Basis>, c: Vec<f64>) -> Taylor {
        assert_eq!(basis.len(), c.len());
        Taylor { basis, c }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn nvars(&self) -> usize {
        self.basis.nvars
    }

    pub fn order(&self) -> usize {
        self.basis.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Constant with the same shape as `self`.
    pub fn lift(&self, v: f64) -> Taylor {
        let mut c = vec![0.0; self.c.len()];
        c[0] = v;
        Taylor {
            basis: self.basis.clone(),
            c,
        }
    }

    pub fn zero_like(&self) -> Taylor {
        self.lift(0.0)
    }

    /// Coefficient of the monomial with the given exponents (0 if truncated away).
    pub fn coeff(&self, exps: &[u8]) -> f64 {
        self.basis.position(exps).map(|k| self.c[k]).unwrap_or(0.0)
    }

    /// First partial derivatives at the base point.
    pub fn gradient(&self) -> Vec<f64> {
        let n = self.nvars();
        (0..n)
            .map(|i| {
                let mut e = vec![0u8; n];
                e[i] = 1;
                self.coeff(&e)
            })
            .collect()
    }

    /// Drop all terms above `order`.
    pub fn truncate(&self, order: usize) -> Taylor {
        if order >= self.order() {
            return self.clone();
        }
        let basis = Basis::get(self.nvars(), order);
        let c = self.c[..basis.len()].to_vec();
        Taylor { basis, c }
    }

    /// Partial derivative with respect to `var`; the result has order one less.
    pub fn d(&self, var: usize) -> Taylor {
        let order = self.order().saturating_sub(1);
        let basis = Basis::get(self.nvars(), order);
        let mut c = vec![0.0; basis.len()];
        if self.order() == 0 {
            return Taylor { basis, c };
        }
        let mut e = vec![0u8; self.nvars()];
        for (k, exps) in self.basis.exps.iter().enumerate() {
            let p = exps[var];
            if p == 0 {
                continue;
            }
            e.copy_from_slice(exps);
            e[var] -= 1;
            let target = basis.index[&e];
            c[target] += p as f64 * self.c[k];
        }
        Taylor { basis, c }
    }

    pub fn scale(&self, s: f64) -> Taylor {
        Taylor {
            basis: self.basis.clone(),
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    fn harmonize(a: &Taylor, b: &Taylor) -> (Taylor, Taylor) {
        assert_eq!(a.nvars(), b.nvars(), "Taylor variable count mismatch");
        let o = a.order().min(b.order());
        (a.truncate(o), b.truncate(o))
    }

    fn zip(&self, other: &Taylor, f: impl Fn(f64, f64) -> f64) -> Taylor {
        if Arc::ptr_eq(&self.basis, &other.basis) {
            let c = self.c.iter().zip(&other.c).map(|(a, b)| f(*a, *b)).collect();
            return Taylor {
                basis: self.basis.clone(),
                c,
            };
        }
        let (a, b) = Taylor::harmonize(self, other);
        a.zip(&b, f)
    }

    pub fn mul_ref(&self, other: &Taylor) -> Taylor {
        if !Arc::ptr_eq(&self.basis, &other.basis) {
            let (a, b) = Taylor::harmonize(self, other);
            return a.mul_ref(&b);
        }
        let mut c = vec![0.0; self.c.len()];
        c[0] = self.c[0] * other.c[0];
        for &(i, j, k) in &self.basis.products {
            c[k as usize] += self.c[i as usize] * other.c[j as usize];
        }
        Taylor {
            basis: self.basis.clone(),
            c,
        }
    }

    /// f(self) given `derivs[k] = f^(k)(self.value())`.
    pub fn compose_univariate(&self, derivs: &[f64]) -> Taylor {
        let order = self.order();
        let mut h = self.clone();
        h.c[0] = 0.0;
        // Horner on sum_k derivs[k]/k! h^k
        let mut fact = vec![1.0; order + 1];
        for k in 1..=order {
            fact[k] = fact[k - 1] * k as f64;
        }
        let mut acc = self.lift(derivs[order] / fact[order]);
        for k in (0..order).rev() {
            acc = acc.mul_ref(&h);
            acc.c[0] += derivs[k] / fact[k];
        }
        acc.c[0] = derivs[0];
        acc
    }

    fn derivs(&self, first: f64, rest: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.order() + 1);
        d.push(first);
        for k in 1..=self.order() {
            d.push(rest(k));
        }
        d
    }

    pub fn recip(&self) -> Taylor {
        let a = self.value();
        // d^k/da^k (1/a) = (-1)^k k! / a^(k+1)
        let d = self.derivs(1.0 / a, |k| {
            let mut f = 1.0;
            for i in 1..=k {
                f *= i as f64;
            }
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            s * f / a.powi(k as i32 + 1)
        });
        self.compose_univariate(&d)
    }

    pub fn div_ref(&self, other: &Taylor) -> Taylor {
        let mut q = self.mul_ref(&other.recip());
        q.c[0] = self.value() / other.value();
        q
    }

    pub fn exp(&self) -> Taylor {
        let e = self.value().exp();
        self.compose_univariate(&self.derivs(e, |_| e))
    }

    pub fn ln(&self) -> Taylor {
        let a = self.value();
        let d = self.derivs(a.ln(), |k| {
            let mut f = 1.0;
            for i in 1..k {
                f *= i as f64;
            }
            let s = if k % 2 == 1 { 1.0 } else { -1.0 };
            s * f / a.powi(k as i32)
        });
        self.compose_univariate(&d)
    }

    pub fn sin(&self) -> Taylor {
        let (s, c) = self.value().sin_cos();
        let cyc = [s, c, -s, -c];
        self.compose_univariate(&self.derivs(s, |k| cyc[k % 4]))
    }

    pub fn cos(&self) -> Taylor {
        let (s, c) = self.value().sin_cos();
        let cyc = [c, -s, -c, s];
        self.compose_univariate(&self.derivs(self.value().cos(), |k| cyc[k % 4]))
    }

    pub fn sinh(&self) -> Taylor {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        self.compose_univariate(&self.derivs(s, |k| if k % 2 == 0 { s } else { c }))
    }

    pub fn cosh(&self) -> Taylor {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        self.compose_univariate(&self.derivs(c, |k| if k % 2 == 0 { c } else { s }))
    }

    pub fn sqrt(&self) -> Taylor {
        let a = self.value();
        let d = self.derivs(a.sqrt(), |k| {
            // (1/2)(1/2 - 1)...(1/2 - k + 1) a^(1/2 - k)
            let mut f = 1.0;
            for i in 0..k {
                f *= 0.5 - i as f64;
            }
            f * a.sqrt() / a.powi(k as i32)
        });
        self.compose_univariate(&d)
    }

    /// Substitute `delta[i]` (polynomials without constant term, in some other
    /// set of variables) for the displacement of variable `i` from the base point.
    pub fn compose(&self, delta: &[Taylor]) -> Taylor {
        assert_eq!(delta.len(), self.nvars());
        let target = &delta[0];
        let order = self.order().min(target.order());
        let delta: Vec<Taylor> = delta.iter().map(|t| t.truncate(order)).collect();
        let mut powers: Vec<Vec<Taylor>> = Vec::with_capacity(delta.len());
        for d in &delta {
            let mut p = vec![d.lift(1.0)];
            for k in 1..=order {
                let next = p[k - 1].mul_ref(d);
                p.push(next);
            }
            powers.push(p);
        }
        let mut out = delta[0].lift(0.0);
        for (k, exps) in self.basis.exps.iter().enumerate() {
            if self.basis.degree[k] > order || self.c[k] == 0.0 {
                continue;
            }
            let mut term = delta[0].lift(self.c[k]);
            for (v, &p) in exps.iter().enumerate() {
                if p > 0 {
                    term = term.mul_ref(&powers[v][p as usize]);
                }
            }
            out += term;
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, o: Taylor) -> Taylor {
        self.zip(&o, |a, b| a + b)
    }
}
impl<'a> Add<&'a Taylor> for &'a Taylor {
    type Output = Taylor;
    fn add(self, o: &Taylor) -> Taylor {
        self.zip(o, |a, b| a + b)
    }
}
impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, o: Taylor) -> Taylor {
        self.zip(&o, |a, b| a - b)
    }
}
impl<'a> Sub<&'a Taylor> for &'a Taylor {
    type Output = Taylor;
    fn sub(self, o: &Taylor) -> Taylor {
        self.zip(o, |a, b| a - b)
    }
}
impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, o: Taylor) -> Taylor {
        self.mul_ref(&o)
    }
}
impl<'a> Mul<&'a Taylor> for &'a Taylor {
    type Output = Taylor;
    fn mul(self, o: &Taylor) -> Taylor {
        self.mul_ref(o)
    }
}
impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(self, s: f64) -> Taylor {
        self.scale(s)
    }
}
impl Mul<f64> for &Taylor {
    type Output = Taylor;
    fn mul(self, s: f64) -> Taylor {
        self.scale(s)
    }
}
impl Div for Taylor {
    type Output = Taylor;
    fn div(self, o: Taylor) -> Taylor {
        self.div_ref(&o)
    }
}
impl<'a> Div<&'a Taylor> for &'a Taylor {
    type Output = Taylor;
    fn div(self, o: &Taylor) -> Taylor {
        self.div_ref(o)
    }
}
impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        Taylor {
            basis: self.basis,
            c: self.c.into_iter().map(|x| -x).collect(),
        }
    }
}
impl Neg for &Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.clone().neg()
    }
}
impl AddAssign for Taylor {
    fn add_assign(&mut self, o: Taylor) {
        *self = self.zip(&o, |a, b| a + b);
    }
}
impl AddAssign<&Taylor> for Taylor {
    fn add_assign(&mut self, o: &Taylor) {
        *self = self.zip(o, |a, b| a + b);
    }
}
impl SubAssign for Taylor {
    fn sub_assign(&mut self, o: Taylor) {
        *self = self.zip(&o, |a, b| a - b);
    }
}
impl SubAssign<&Taylor> for Taylor {
    fn sub_assign(&mut self, o: &Taylor) {
        *self = self.zip(o, |a, b| a - b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes() {
        assert_eq!(Basis::get(4, 2).len(), 15);
        assert_eq!(Basis::get(3, 3).len(), 20);
        assert_eq!(Basis::get(2, 0).len(), 1);
        // graded: lower orders are prefixes
        let b2 = Basis::get(3, 2);
        let b3 = Basis::get(3, 3);
        for k in 0..b2.len() {
            assert_eq!(b2.exponents(k), b3.exponents(k));
        }
    }

    #[test]
    fn product_of_variables() {
        let v = Taylor::variables(&[2.0, 3.0], 2);
        let p = &v[0] * &v[1];
        assert_eq!(p.value(), 6.0);
        assert_eq!(p.gradient(), vec![3.0, 2.0]);
        assert_eq!(p.coeff(&[1, 1]), 1.0);
    }

    #[test]
    fn exp_series_coefficients() {
        let x = Taylor::variable(1, 4, 0, 0.0);
        let e = x.exp();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (k, w) in want.iter().enumerate() {
            assert!((e.coeff(&[k as u8]) - w).abs() < 1e-15);
        }
    }

    #[test]
    fn ln_of_exp_is_identity() {
        let x = Taylor::variables(&[0.3, -0.2], 3);
        let y = (&x[0] * &x[1]).exp().ln();
        let want = &x[0] * &x[1];
        for (a, b) in y.coeffs().iter().zip(want.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn sqrt_squared() {
        let x = Taylor::variables(&[1.7, 0.4], 3);
        let s = (&x[0] + &x[1]).sqrt();
        let back = &s * &s;
        let want = &x[0] + &x[1];
        for (a, b) in back.coeffs().iter().zip(want.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_lowers_order() {
        let x = Taylor::variables(&[1.0, 2.0], 3);
        let f = &(&x[0] * &x[0]) * &x[1];
        let fx = f.d(0);
        assert_eq!(fx.order(), 2);
        assert_eq!(fx.value(), 4.0);
        let fxy = fx.d(1);
        assert_eq!(fxy.value(), 2.0);
    }

    #[test]
    fn compose_matches_direct_evaluation() {
        // f(x) = exp(x0) * x1 around (0.2, 1.5); substitute x = (0.2 + u0 + u1^2, 1.5 + 2 u1)
        let xs = Taylor::variables(&[0.2, 1.5], 3);
        let f = &xs[0].exp() * &xs[1];
        let u = Taylor::variables(&[0.0, 0.0], 3);
        let d0 = &u[0] + &(&u[1] * &u[1]);
        let d1 = u[1].scale(2.0);
        let g = f.compose(&[d0.clone(), d1.clone()]);
        let direct = &(&d0 + &u[0].lift(0.2)).exp() * &(&d1 + &u[0].lift(1.5));
        for (a, b) in g.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }
}
