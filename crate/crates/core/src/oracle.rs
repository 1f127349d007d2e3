//! Finite-difference oracles and a seeded generator of well-defined random
//! expressions, used to cross-check the Taylor arithmetic.

use rand::Rng;

/// A random expression in `coords` that is finite and smooth everywhere:
/// divisions, logarithms and roots only see arguments bounded away from 0.
pub fn random_expression<R: Rng>(rng: &mut R, coords: &[String], depth: usize) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        return if rng.random_bool(0.7) {
            coords[rng.random_range(0..coords.len())].clone()
        } else {
            format!("{:.3}", rng.random_range(-2.0..2.0))
        };
    }
    let op = rng.random_range(0..12);
    let a = random_expression(rng, coords, depth - 1);
    match op {
        0..=3 => {
            let b = random_expression(rng, coords, depth - 1);
            match op {
                0 => format!("({a})+({b})"),
                1 => format!("({a})-({b})"),
                2 => format!("({a})*({b})"),
                _ => format!("({a})/(2+sin({b}))"),
            }
        }
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(sin({a}))"),
        7 => format!("sqrt(2+cos({a}))"),
        8 => format!("ln(2+cos({a}))"),
        9 => format!("sinh(sin({a}))"),
        10 => format!("cosh(cos({a}))"),
        _ => format!("(sin({a}))^{}", rng.random_range(2..4)),
    }
}

/// Central-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, p: &[f64], h: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    (0..p.len())
        .map(|i| {
            q[i] = p[i] + h;
            let fp = f(&q);
            q[i] = p[i] - h;
            let fm = f(&q);
            q[i] = p[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Jacobian of a vector-valued map, `[i][j] = ∂_j f_i`.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, p: &[f64], h: f64) -> Vec<Vec<f64>> {
    let mut q = p.to_vec();
    let cols: Vec<Vec<f64>> = (0..p.len())
        .map(|j| {
            q[j] = p[j] + h;
            let fp = f(&q);
            q[j] = p[j] - h;
            let fm = f(&q);
            q[j] = p[j];
            fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        })
        .collect();
    let rows = cols.first().map_or(0, Vec::len);
    (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// |a − b| scaled by max(1, |a|).
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fd_gradient_of_a_quadratic() {
        let g = fd_gradient(|p| p[0] * p[0] + 3.0 * p[1], &[2.0, 1.0], 1e-4);
        assert!((g[0] - 4.0).abs() < 1e-8 && (g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn generator_is_seeded() {
        let c = vec!["x".to_string(), "y".to_string()];
        let a = random_expression(&mut ChaCha8Rng::seed_from_u64(3), &c, 4);
        let b = random_expression(&mut ChaCha8Rng::seed_from_u64(3), &c, 4);
        assert_eq!(a, b);
    }
}
