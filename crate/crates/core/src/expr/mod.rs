//! Component expressions over chart coordinates.
//!
//! Expressions are parsed once into an [`ExprTree`] and evaluated either on
//! plain `f64` values or on truncated Taylor polynomials, which yields exact
//! derivatives. [`ExprTree::eval_jet`] packages the order-2 case as a [`Jet2`].

mod parser;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::taylor::Taylor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Func(Func, Box<Node>),
}

impl Node {
    fn has_var(&self) -> bool {
        match self {
            Node::Num(_) => false,
            Node::Var(_) => true,
            Node::Neg(a) | Node::Func(_, a) => a.has_var(),
            Node::Bin(_, a, b) => a.has_var() || b.has_var(),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Node::Num(_) => None,
            Node::Var(k) => Some(*k),
            Node::Neg(a) | Node::Func(_, a) => a.max_var(),
            Node::Bin(_, a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    fn write(&self, names: &[String], out: &mut String) {
        match self {
            Node::Num(v) => out.push_str(&format!("{v:?}")),
            Node::Var(k) => match names.get(*k) {
                Some(n) => out.push_str(n),
                None => out.push_str(&format!("#{k}")),
            },
            Node::Neg(a) => {
                out.push_str("(-");
                a.write(names, out);
                out.push(')');
            }
            Node::Bin(op, a, b) => {
                out.push('(');
                a.write(names, out);
                out.push_str(match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                });
                b.write(names, out);
                out.push(')');
            }
            Node::Func(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(names, out);
                out.push(')');
            }
        }
    }
}

/// Values an expression can be evaluated on.
pub trait Scalar: Clone {
    fn value(&self) -> f64;
    /// A constant of the same kind (same shape for polynomials).
    fn lift(&self, v: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn recip(&self) -> Self;
    fn func(&self, f: Func) -> Self;
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, v: f64) -> f64 {
        v
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn div(&self, o: &f64) -> f64 {
        self / o
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn recip(&self) -> f64 {
        1.0 / self
    }
    fn func(&self, f: Func) -> f64 {
        match f {
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Sqrt => self.sqrt(),
        }
    }
}

impl Scalar for Taylor {
    fn value(&self) -> f64 {
        Taylor::value(self)
    }
    fn lift(&self, v: f64) -> Taylor {
        Taylor::lift(self, v)
    }
    fn add(&self, o: &Taylor) -> Taylor {
        self + o
    }
    fn sub(&self, o: &Taylor) -> Taylor {
        self - o
    }
    fn mul(&self, o: &Taylor) -> Taylor {
        self.mul_ref(o)
    }
    fn div(&self, o: &Taylor) -> Taylor {
        self.div_ref(o)
    }
    fn neg(&self) -> Taylor {
        -self
    }
    fn recip(&self) -> Taylor {
        Taylor::recip(self)
    }
    fn func(&self, f: Func) -> Taylor {
        match f {
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Sqrt => self.sqrt(),
        }
    }
}

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<Vec<f64>>,
}

impl Jet2 {
    /// Read an order-2 jet off a Taylor polynomial (order >= 2).
    pub fn from_taylor(t: &Taylor) -> Jet2 {
        let n = t.nvars();
        let mut hessian = vec![vec![0.0; n]; n];
        let mut e = vec![0u8; n];
        for i in 0..n {
            e[i] = 2;
            hessian[i][i] = 2.0 * t.coeff(&e);
            e[i] = 1;
            for j in i + 1..n {
                e[j] = 1;
                let h = t.coeff(&e);
                hessian[i][j] = h;
                hessian[j][i] = h;
                e[j] = 0;
            }
            e[i] = 0;
        }
        Jet2 {
            value: t.value(),
            gradient: t.gradient(),
            hessian,
        }
    }
}

/// A parsed component expression together with the coordinate names it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprTree {
    root: Node,
    coords: Arc<Vec<String>>,
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.root.write(&self.coords, &mut s);
        f.write_str(&s)
    }
}

/// Parse `src` against the given coordinate names.
pub fn parse_expr(src: &str, coords: &[String]) -> Result<ExprTree> {
    let root = parser::Parser::parse(src, coords)?;
    Ok(ExprTree {
        root,
        coords: Arc::new(coords.to_vec()),
    })
}

impl ExprTree {
    pub fn parse(src: &str, coords: &[String]) -> Result<ExprTree> {
        parse_expr(src, coords)
    }

    pub fn from_node(root: Node, coords: &[String]) -> ExprTree {
        ExprTree {
            root,
            coords: Arc::new(coords.to_vec()),
        }
    }

    pub fn constant(v: f64, coords: &[String]) -> ExprTree {
        ExprTree::from_node(Node::Num(v), coords)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    /// Fully parenthesized text that parses back to the same tree.
    pub fn print(&self) -> String {
        self.to_string()
    }

    pub fn is_constant(&self) -> bool {
        !self.root.has_var()
    }

    /// Highest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        self.root.max_var()
    }

    fn subexpr(&self, n: &Node) -> String {
        let mut s = String::new();
        n.write(&self.coords, &mut s);
        s
    }

    /// Evaluate on any [`Scalar`]; `vars[k]` is the value of coordinate `k`.
    pub fn eval<S: Scalar>(&self, vars: &[S]) -> Result<S> {
        if let Some(k) = self.max_coord() {
            if k >= vars.len() {
                return Err(Error::Dimension {
                    field: self.to_string(),
                    message: format!("refers to coordinate {k} but the point has {}", vars.len()),
                });
            }
        }
        let template = vars.first().cloned().ok_or_else(|| Error::Dimension {
            field: self.to_string(),
            message: "evaluation point has no coordinates".into(),
        })?;
        self.eval_node(&self.root, vars, &template)
    }

    fn domain<S: Scalar>(&self, n: &Node, vars: &[S], msg: &str) -> Error {
        Error::Domain {
            subexpr: self.subexpr(n),
            point: vars.iter().map(|v| v.value()).collect(),
            message: msg.to_string(),
        }
    }

    fn eval_node<S: Scalar>(&self, n: &Node, vars: &[S], t: &S) -> Result<S> {
        let out = match n {
            Node::Num(v) => t.lift(*v),
            Node::Var(k) => vars[*k].clone(),
            Node::Neg(a) => self.eval_node(a, vars, t)?.neg(),
            Node::Func(f, a) => {
                let x = self.eval_node(a, vars, t)?;
                match f {
                    Func::Ln if x.value() <= 0.0 => {
                        return Err(self.domain(n, vars, "logarithm of a nonpositive value"))
                    }
                    Func::Sqrt if x.value() <= 0.0 => {
                        return Err(self.domain(n, vars, "square root of a nonpositive value"))
                    }
                    _ => x.func(*f),
                }
            }
            Node::Bin(op, a, b) => {
                let x = self.eval_node(a, vars, t)?;
                match op {
                    BinOp::Add => x.add(&self.eval_node(b, vars, t)?),
                    BinOp::Sub => x.sub(&self.eval_node(b, vars, t)?),
                    BinOp::Mul => x.mul(&self.eval_node(b, vars, t)?),
                    BinOp::Div => {
                        let y = self.eval_node(b, vars, t)?;
                        if y.value() == 0.0 {
                            return Err(self.domain(n, vars, "division by zero"));
                        }
                        x.div(&y)
                    }
                    BinOp::Pow => self.pow(n, x, b, vars, t)?,
                }
            }
        };
        if !out.value().is_finite() {
            return Err(self.domain(n, vars, "non-finite result"));
        }
        Ok(out)
    }

    fn pow<S: Scalar>(&self, n: &Node, base: S, e: &Node, vars: &[S], t: &S) -> Result<S> {
        if !e.has_var() {
            let ev = self.eval_node(e, vars, t)?.value();
            if ev.fract() == 0.0 && ev.abs() <= 1.0e9 {
                let k = ev.abs() as u64;
                if ev < 0.0 && base.value() == 0.0 {
                    return Err(self.domain(n, vars, "zero raised to a negative power"));
                }
                let p = powi(&base, k);
                return Ok(if ev < 0.0 { p.recip() } else { p });
            }
        }
        if base.value() <= 0.0 {
            return Err(self.domain(n, vars, "non-integer power of a nonpositive base"));
        }
        let ex = self.eval_node(e, vars, t)?;
        Ok(ex.mul(&base.func(Func::Ln)).func(Func::Exp))
    }

    /// Value at `p`.
    pub fn eval_value(&self, p: &[f64]) -> Result<f64> {
        self.eval(p)
    }

    /// Value, gradient and Hessian at `p`.
    pub fn eval_jet(&self, p: &[f64]) -> Result<Jet2> {
        let vars = Taylor::variables(p, 2);
        Ok(Jet2::from_taylor(&self.eval(&vars)?))
    }

    /// Truncated Taylor expansion of the given order around `p`.
    pub fn eval_taylor(&self, p: &[f64], order: usize) -> Result<Taylor> {
        self.eval(&Taylor::variables(p, order))
    }
}

/// Repeated multiplication by squaring; `x^0 = 1`.
fn powi<S: Scalar>(x: &S, mut k: u64) -> S {
    let mut acc: Option<S> = None;
    let mut sq = x.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => sq.clone(),
                Some(a) => a.mul(&sq),
            });
        }
        k >>= 1;
        if k > 0 {
            sq = sq.mul(&sq);
        }
    }
    acc.unwrap_or_else(|| x.lift(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn example_metric_component_tree() {
        let t = parse_expr("1+exp(-x1+x3)", &coords(4)).unwrap();
        let want = Node::Bin(
            BinOp::Add,
            Box::new(Node::Num(1.0)),
            Box::new(Node::Func(
                Func::Exp,
                Box::new(Node::Bin(
                    BinOp::Add,
                    Box::new(Node::Neg(Box::new(Node::Var(0)))),
                    Box::new(Node::Var(2)),
                )),
            )),
        );
        assert_eq!(t.root, want);
    }

    #[test]
    fn single_coordinate() {
        let t = parse_expr("x1", &coords(4)).unwrap();
        assert_eq!(t.root, Node::Var(0));
    }

    #[test]
    fn power_is_right_associative() {
        let c = coords(2);
        let t = parse_expr("x1^x2^2", &c).unwrap();
        let want = Node::Bin(
            BinOp::Pow,
            Box::new(Node::Var(0)),
            Box::new(Node::Bin(
                BinOp::Pow,
                Box::new(Node::Var(1)),
                Box::new(Node::Num(2.0)),
            )),
        );
        assert_eq!(t.root, want);
        // 2^(3^2) = 512, (2^3)^2 = 64
        assert!((t.eval_value(&[2.0, 3.0]).unwrap() - 512.0).abs() < 1e-12);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let c = coords(1);
        let t = parse_expr("-x1^2", &c).unwrap();
        assert_eq!(t.eval_value(&[3.0]).unwrap(), -9.0);
        let t = parse_expr("2^-1", &c).unwrap();
        assert_eq!(t.eval_value(&[3.0]).unwrap(), 0.5);
    }

    #[test]
    fn errors_carry_offsets() {
        let c = coords(2);
        match parse_expr("x1 + y", &c) {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "y");
                assert_eq!(offset, 5);
            }
            other => panic!("{other:?}"),
        }
        match parse_expr("foo(x1)", &c) {
            Err(Error::UnknownFunction { offset: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_expr("x1 * (x2", &c) {
            Err(Error::Syntax { offset: 8, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("2 x1", &c), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("exp", &c), Err(Error::Syntax { .. })));
    }

    #[test]
    fn jet_of_exponential() {
        let t = parse_expr("exp(-x1+x3)", &coords(4)).unwrap();
        let j = t.eval_jet(&[0.0; 4]).unwrap();
        assert_eq!(j.value, 1.0);
        assert_eq!(j.gradient, vec![-1.0, 0.0, 1.0, 0.0]);
        let mut h = vec![vec![0.0; 4]; 4];
        h[0][0] = 1.0;
        h[0][2] = -1.0;
        h[2][0] = -1.0;
        h[2][2] = 1.0;
        assert_eq!(j.hessian, h);
    }

    #[test]
    fn metric_component_values() {
        let c = coords(4);
        let g11 = parse_expr("1+exp(-x1+x3)", &c).unwrap();
        assert_eq!(g11.eval_jet(&[0.0; 4]).unwrap().value, 2.0);
        let g22 = parse_expr("exp(x1-x3)", &c).unwrap();
        assert_eq!(g22.eval_value(&[0.0; 4]).unwrap(), 1.0);
        let k = parse_expr("3", &c).unwrap();
        assert_eq!(k.eval_value(&[0.3, -1.0, 2.0, 5.0]).unwrap(), 3.0);
    }

    #[test]
    fn domain_errors() {
        let c = coords(2);
        let p = [0.0, -1.0];
        for src in ["ln(x2)", "sqrt(x2)", "1/x1", "x2^0.5", "x1^-2"] {
            let t = parse_expr(src, &c).unwrap();
            let e = t.eval_value(&p).unwrap_err();
            assert!(matches!(e, Error::Domain { .. }), "{src}: {e:?}");
            assert!(t.eval_jet(&p).is_err());
        }
        // integer powers of negative bases are fine
        let t = parse_expr("x2^3", &c).unwrap();
        assert_eq!(t.eval_value(&p).unwrap(), -1.0);
    }

    #[test]
    fn printing_round_trips() {
        let c = coords(3);
        for src in [
            "1+exp(-x1+x3)",
            "-x1^2*x2/(3-x3)",
            "sqrt(cosh(x1)+1.5e-3)^-2",
            "x1^x2^x3 - -x2",
            "ln(2+sin(x1)*cos(x2)) - sinh(x3/4)",
        ] {
            let t = parse_expr(src, &c).unwrap();
            let again = parse_expr(&t.print(), &c).unwrap();
            assert_eq!(t, again, "{src} -> {}", t.print());
        }
    }
}
