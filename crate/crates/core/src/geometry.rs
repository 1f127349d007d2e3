//! Charts, metrics, connections and curvature.
//!
//! Index conventions: `gamma[[k, i, j]]` is Γ^k_{ij}, the `∂k` component of
//! ∇_{∂i}∂j. `riemann[[l, i, j, k]]` is R^l_{ijk}, the `∂l` component of
//! R(∂i,∂j)∂k. Matrices of (1,1) tensors are indexed `[[row, col]]` with
//! `T ∂j = Σ_i T[[i, j]] ∂i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::ExprTree;
use crate::linalg::{metric_inverse_at as invert_checked, tinverse};
use crate::taylor::Taylor;
use crate::tensor::Arr;

/// Which connection a coefficient set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectionKind {
    Primal,
    Dual,
    Mean,
    LeviCivita,
}

/// Connection coefficients at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionAt {
    pub point: Vec<f64>,
    pub kind: ConnectionKind,
    pub gamma: Arr<f64>,
}

/// Curvature components at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureAt {
    pub point: Vec<f64>,
    pub kind: ConnectionKind,
    pub r: Arr<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelCurvatureParams {
    pub c: f64,
}

/// How the primal connection of a chart is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum Connection {
    /// Levi-Civita connection of the metric.
    LeviCivita,
    /// Coefficients Γ^k_{ij} given as expressions, indexed `[[k, i, j]]`.
    Explicit(Arr<ExprTree>),
    /// Levi-Civita plus g^{kl} C_{lij} for a totally symmetric cubic form C.
    LeviCivitaWithCubic(Arr<ExprTree>),
}

/// Almost product-like structure F, as a matrix of expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureField {
    pub f: Arr<ExprTree>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartGeometry {
    pub coords: Vec<String>,
    pub bounds: Vec<(f64, f64)>,
    pub metric: Arr<ExprTree>,
    pub connection: Connection,
    pub structure: Option<StructureField>,
}

impl ChartGeometry {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn has_structure(&self) -> bool {
        self.structure.is_some()
    }
}

/// Deterministic set of evaluation points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplePlan {
    pub grid: usize,
    pub random: usize,
    pub seed: u64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            grid: 3,
            random: 17,
            seed: 42,
        }
    }
}

impl SamplePlan {
    /// Grid points over the centered half-extent sub-box (first axis slowest),
    /// followed by seeded uniform points in the full box.
    pub fn points(&self, bounds: &[(f64, f64)]) -> Vec<Vec<f64>> {
        let n = bounds.len();
        let mut out = Vec::new();
        if self.grid > 0 && n > 0 {
            let axes: Vec<Vec<f64>> = bounds
                .iter()
                .map(|&(lo, hi)| {
                    let c = 0.5 * (lo + hi);
                    let w = 0.25 * (hi - lo);
                    if self.grid == 1 {
                        vec![c]
                    } else {
                        (0..self.grid)
                            .map(|k| c - w + 2.0 * w * k as f64 / (self.grid - 1) as f64)
                            .collect()
                    }
                })
                .collect();
            let total = self.grid.pow(n as u32);
            for mut k in 0..total {
                let mut p = vec![0.0; n];
                for d in (0..n).rev() {
                    p[d] = axes[d][k % self.grid];
                    k /= self.grid;
                }
                out.push(p);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random {
            let p: Vec<f64> = bounds
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect();
            out.push(p);
        }
        out
    }
}

/// Metric with first and second derivatives at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub g: Arr<f64>,
    /// `dg[[k, i, j]] = ∂k g_ij`
    pub dg: Arr<f64>,
    /// `d2g[[l, k, i, j]] = ∂l ∂k g_ij`
    pub d2g: Arr<f64>,
}

pub fn metric_at(geom: &ChartGeometry, p: &[f64]) -> Result<MetricJet> {
    let n = geom.dim();
    let jets = Arr::try_from_fn(&[n, n], |i| geom.metric[[i[0], i[1]]].eval_jet(p))?;
    Ok(MetricJet {
        g: Arr::from_fn(&[n, n], |i| jets[[i[0], i[1]]].value),
        dg: Arr::from_fn(&[n, n, n], |i| jets[[i[1], i[2]]].gradient[i[0]]),
        d2g: Arr::from_fn(&[n, n, n, n], |i| jets[[i[2], i[3]]].hessian[i[0]][i[1]]),
    })
}

pub use crate::linalg::metric_inverse_at;

/// Metric, connections and structure of a chart expanded around one point.
///
/// The metric and its inverse are order-2 Taylor fields; connections and the
/// structure are order-1 fields, enough for curvature and covariant derivatives.
#[derive(Debug, Clone)]
pub struct AmbientJets {
    pub point: Vec<f64>,
    pub g: Arr<Taylor>,
    pub ginv: Arr<Taylor>,
    pub gamma: Arr<Taylor>,
    pub dual_gamma: Arr<Taylor>,
    pub f: Option<Arr<Taylor>>,
    pub f_star: Option<Arr<Taylor>>,
}

/// `dg[[k, i, j]] = ∂k g_ij` as order-(K-1) fields.
fn metric_derivs(g: &Arr<Taylor>) -> Arr<Taylor> {
    let n = g.shape()[0];
    Arr::from_fn(&[n, n, n], |i| g[[i[1], i[2]]].d(i[0]))
}

/// Levi-Civita coefficients from a metric field of order >= 1.
pub fn levi_civita_field(g: &Arr<Taylor>, ginv: &Arr<Taylor>) -> Arr<Taylor> {
    let n = g.shape()[0];
    let dg = metric_derivs(g);
    Arr::from_fn(&[n, n, n], |x| {
        let (k, i, j) = (x[0], x[1], x[2]);
        let mut acc = dg[[0, 0, 0]].zero_like();
        for l in 0..n {
            let s = &(&dg[[i, l, j]] + &dg[[j, i, l]]) - &dg[[l, i, j]];
            acc += ginv[[k, l]].mul_ref(&s);
        }
        acc.scale(0.5)
    })
}

/// Dual coefficients Γ*^m_{kj} = g^{im}(∂k g_ij − Γ^l_{ki} g_lj).
pub fn dual_field(g: &Arr<Taylor>, ginv: &Arr<Taylor>, gamma: &Arr<Taylor>) -> Arr<Taylor> {
    let n = g.shape()[0];
    let dg = metric_derivs(g);
    // lowered[i, k, j] = ∂k g_ij − Γ^l_{ki} g_lj
    let lowered = Arr::from_fn(&[n, n, n], |x| {
        let (i, k, j) = (x[0], x[1], x[2]);
        let mut acc = dg[[k, i, j]].clone();
        for l in 0..n {
            acc -= gamma[[l, k, i]].mul_ref(&g[[l, j]]);
        }
        acc
    });
    Arr::from_fn(&[n, n, n], |x| {
        let (m, k, j) = (x[0], x[1], x[2]);
        let mut acc = ginv[[0, m]].mul_ref(&lowered[[0, k, j]]);
        for i in 1..n {
            acc += ginv[[i, m]].mul_ref(&lowered[[i, k, j]]);
        }
        acc
    })
}

/// F* = g⁻¹ Fᵀ g on fields.
pub fn conjugate_field(g: &Arr<Taylor>, ginv: &Arr<Taylor>, f: &Arr<Taylor>) -> Arr<Taylor> {
    let n = g.shape()[0];
    // (Fᵀ g)[k, j] = Σ_l F[l, k] g[l, j]
    let ftg = Arr::from_fn(&[n, n], |x| {
        let (k, j) = (x[0], x[1]);
        let mut acc = f[[0, k]].mul_ref(&g[[0, j]]);
        for l in 1..n {
            acc += f[[l, k]].mul_ref(&g[[l, j]]);
        }
        acc
    });
    Arr::from_fn(&[n, n], |x| {
        let (i, j) = (x[0], x[1]);
        let mut acc = ginv[[i, 0]].mul_ref(&ftg[[0, j]]);
        for k in 1..n {
            acc += ginv[[i, k]].mul_ref(&ftg[[k, j]]);
        }
        acc
    })
}

/// Curvature values from an order->=1 connection field.
pub fn riemann_from_field(gamma: &Arr<Taylor>) -> Arr<f64> {
    let n = gamma.shape()[0];
    let v = gamma.values();
    let d = gamma.derivatives();
    Arr::from_fn(&[n, n, n, n], |x| {
        let (l, i, j, k) = (x[0], x[1], x[2], x[3]);
        let mut quad = 0.0;
        for m in 0..n {
            quad += v[[m, j, k]] * v[[l, i, m]] - v[[m, i, k]] * v[[l, j, m]];
        }
        (d[[i, l, j, k]] - d[[j, l, i, k]]) + quad
    })
}

impl AmbientJets {
    pub fn at(geom: &ChartGeometry, p: &[f64]) -> Result<AmbientJets> {
        let n = geom.dim();
        if p.len() != n {
            return Err(Error::Dimension {
                field: "point".into(),
                message: format!("expected {n} coordinates, got {}", p.len()),
            });
        }
        let vars2 = Taylor::variables(p, 2);
        let raw = Arr::try_from_fn(&[n, n], |i| geom.metric[[i[0], i[1]]].eval(&vars2))?;
        let g = Arr::from_fn(&[n, n], |i| {
            if i[0] == i[1] {
                raw[[i[0], i[1]]].clone()
            } else {
                (&raw[[i[0], i[1]]] + &raw[[i[1], i[0]]]).scale(0.5)
            }
        });
        invert_checked(&g.values(), p)?;
        let ginv = tinverse(&g).ok_or_else(|| Error::SingularMetric {
            point: p.to_vec(),
            condition: f64::INFINITY,
        })?;
        let vars1 = Taylor::variables(p, 1);
        let gamma = match &geom.connection {
            Connection::LeviCivita => levi_civita_field(&g, &ginv),
            Connection::Explicit(trees) => {
                Arr::try_from_fn(&[n, n, n], |i| trees[[i[0], i[1], i[2]]].eval(&vars1))?
            }
            Connection::LeviCivitaWithCubic(cubic) => {
                let lc = levi_civita_field(&g, &ginv);
                let c = Arr::try_from_fn(&[n, n, n], |i| cubic[[i[0], i[1], i[2]]].eval(&vars1))?;
                Arr::from_fn(&[n, n, n], |x| {
                    let (k, i, j) = (x[0], x[1], x[2]);
                    let mut acc = lc[[k, i, j]].clone();
                    for l in 0..n {
                        acc += ginv[[k, l]].mul_ref(&c[[l, i, j]]);
                    }
                    acc
                })
            }
        };
        let dual_gamma = dual_field(&g, &ginv, &gamma);
        let (f, f_star) = match &geom.structure {
            Some(s) => {
                let f = Arr::try_from_fn(&[n, n], |i| s.f[[i[0], i[1]]].eval(&vars1))?;
                let fs = conjugate_field(&g, &ginv, &f);
                (Some(f), Some(fs))
            }
            None => (None, None),
        };
        Ok(AmbientJets {
            point: p.to_vec(),
            g,
            ginv,
            gamma,
            dual_gamma,
            f,
            f_star,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn metric(&self) -> Arr<f64> {
        self.g.values()
    }

    pub fn metric_inverse(&self) -> Arr<f64> {
        self.ginv.values()
    }

    /// Connection field of the requested kind (order 1).
    pub fn field(&self, kind: ConnectionKind) -> Arr<Taylor> {
        match kind {
            ConnectionKind::Primal => self.gamma.clone(),
            ConnectionKind::Dual => self.dual_gamma.clone(),
            ConnectionKind::Mean => {
                Arr::from_fn(self.gamma.shape(), |i| {
                    (self.gamma.get(i) + self.dual_gamma.get(i)).scale(0.5)
                })
            }
            ConnectionKind::LeviCivita => levi_civita_field(&self.g, &self.ginv),
        }
    }

    pub fn connection(&self, kind: ConnectionKind) -> ConnectionAt {
        ConnectionAt {
            point: self.point.clone(),
            kind,
            gamma: self.field(kind).values(),
        }
    }

    pub fn curvature(&self, kind: ConnectionKind) -> CurvatureAt {
        CurvatureAt {
            point: self.point.clone(),
            kind,
            r: riemann_from_field(&self.field(kind)),
        }
    }

    /// ∂k g_ij values.
    pub fn metric_gradient(&self) -> Arr<f64> {
        let n = self.dim();
        Arr::from_fn(&[n, n, n], |i| self.g[[i[1], i[2]]].gradient()[i[0]])
    }

    pub fn structure_values(&self) -> Option<Arr<f64>> {
        self.f.as_ref().map(|f| f.values())
    }

    pub fn conjugate_values(&self) -> Option<Arr<f64>> {
        self.f_star.as_ref().map(|f| f.values())
    }
}

/// Levi-Civita connection at a point.
pub fn levi_civita_at(geom: &ChartGeometry, p: &[f64]) -> Result<ConnectionAt> {
    Ok(AmbientJets::at(geom, p)?.connection(ConnectionKind::LeviCivita))
}

/// Dual of the chart's connection at a point.
pub fn dual_connection_at(geom: &ChartGeometry, p: &[f64]) -> Result<ConnectionAt> {
    Ok(AmbientJets::at(geom, p)?.connection(ConnectionKind::Dual))
}

/// Dual coefficients from point values: Γ*^m_{kj} = g^{im}(∂k g_ij − Γ^l_{ki} g_lj).
pub fn dual_coefficients(g: &Arr<f64>, ginv: &Arr<f64>, dg: &Arr<f64>, gamma: &Arr<f64>) -> Arr<f64> {
    let n = g.shape()[0];
    Arr::from_fn(&[n, n, n], |x| {
        let (m, k, j) = (x[0], x[1], x[2]);
        let mut acc = 0.0;
        for i in 0..n {
            let mut low = dg[[k, i, j]];
            for l in 0..n {
                low -= gamma[[l, k, i]] * g[[l, j]];
            }
            acc += ginv[[i, m]] * low;
        }
        acc
    })
}

/// C_kij = ∂k g_ij − Γ^l_{ki} g_lj − Γ^l_{kj} g_il.
pub fn nabla_g_at(g: &Arr<f64>, dg: &Arr<f64>, gamma: &Arr<f64>) -> Arr<f64> {
    let n = g.shape()[0];
    Arr::from_fn(&[n, n, n], |x| {
        let (k, i, j) = (x[0], x[1], x[2]);
        let mut c = dg[[k, i, j]];
        for l in 0..n {
            c -= gamma[[l, k, i]] * g[[l, j]] + gamma[[l, k, j]] * g[[i, l]];
        }
        c
    })
}

/// Curvature of the chart's connection field of the given kind.
pub fn riemann_at(geom: &ChartGeometry, p: &[f64], kind: ConnectionKind) -> Result<CurvatureAt> {
    Ok(AmbientJets::at(geom, p)?.curvature(kind))
}

/// (∇_k T)^i_j = ∂k T^i_j + Γ^i_{km} T^m_j − Γ^m_{kj} T^i_m, indexed `[[k, i, j]]`.
pub fn covariant_derivative_tensor11(gamma: &Arr<f64>, t: &Arr<Taylor>) -> Arr<f64> {
    let n = gamma.shape()[0];
    let tv = t.values();
    let td = t.derivatives();
    Arr::from_fn(&[n, n, n], |x| {
        let (k, i, j) = (x[0], x[1], x[2]);
        let mut acc = td[[k, i, j]];
        for m in 0..n {
            acc += gamma[[i, k, m]] * tv[[m, j]] - gamma[[m, k, j]] * tv[[i, m]];
        }
        acc
    })
}

/// Covariant derivative of an expression-valued (1,1) tensor at a point.
pub fn covariant_derivative_tensor11_at(
    conn: &ConnectionAt,
    t: &Arr<ExprTree>,
) -> Result<Arr<f64>> {
    let n = conn.gamma.shape()[0];
    let vars = Taylor::variables(&conn.point, 1);
    let tt = Arr::try_from_fn(&[n, n], |i| t[[i[0], i[1]]].eval(&vars))?;
    Ok(covariant_derivative_tensor11(&conn.gamma, &tt))
}

/// δ^l_i g_jk − δ^l_j g_ik.
pub fn constant_curvature_model(g: &Arr<f64>) -> Arr<f64> {
    let n = g.shape()[0];
    Arr::from_fn(&[n, n, n, n], |x| {
        let (l, i, j, k) = (x[0], x[1], x[2], x[3]);
        let a = if l == i { g[[j, k]] } else { 0.0 };
        let b = if l == j { g[[i, k]] } else { 0.0 };
        a - b
    })
}

/// Result of a least-squares fit of curvature against a one-parameter model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureFit {
    /// `None` when the model vanishes at every sample.
    pub c: Option<f64>,
    pub residual: f64,
}

/// Least-squares c minimizing Σ |R − c·M|² over all samples.
pub fn fit_scalar_model(samples: &[(Arr<f64>, Arr<f64>)]) -> CurvatureFit {
    let (mut num, mut den) = (0.0, 0.0);
    for (r, m) in samples {
        for (a, b) in r.iter().zip(m.iter()) {
            num += a * b;
            den += b * b;
        }
    }
    if den == 0.0 {
        let residual = samples.iter().fold(0.0f64, |acc, (r, _)| acc.max(r.max_abs()));
        return CurvatureFit { c: None, residual };
    }
    let c = num / den;
    let residual = samples.iter().fold(0.0f64, |acc, (r, m)| {
        r.iter()
            .zip(m.iter())
            .fold(acc, |a, (x, y)| a.max((x - c * y).abs()))
    });
    CurvatureFit { c: Some(c), residual }
}

/// Fit R of the given connection against c(δ^l_i g_jk − δ^l_j g_ik) over a plan.
pub fn constant_curvature_fit(
    geom: &ChartGeometry,
    plan: &SamplePlan,
    kind: ConnectionKind,
) -> Result<CurvatureFit> {
    let mut samples = Vec::new();
    for p in plan.points(&geom.bounds) {
        let jets = AmbientJets::at(geom, &p)?;
        samples.push((jets.curvature(kind).r, constant_curvature_model(&jets.metric())));
    }
    Ok(fit_scalar_model(&samples))
}
