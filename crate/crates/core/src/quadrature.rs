//! Gauss–Legendre quadrature with adaptive node doubling, for scalar and
//! matrix-valued integrands.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qcore::CMatrix;

/// Node cap for adaptive doubling.
pub const MAX_NODES: usize = 1024;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Integrates `f` over `[a, b]`, doubling the node count from 8 until two
/// successive results differ by less than `abs_tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut n = 8;
    let mut prev = GaussLegendre::new(n).integrate(&f, a, b);
    loop {
        n *= 2;
        if n > MAX_NODES {
            return Err(Error::QuadratureNonConvergence {
                nodes: n / 2,
                residual: f64::NAN,
            });
        }
        let next = GaussLegendre::new(n).integrate(&f, a, b);
        let residual = (next - prev).abs();
        if residual < abs_tol {
            return Ok(next);
        }
        prev = next;
        if n * 2 > MAX_NODES {
            return Err(Error::QuadratureNonConvergence { nodes: n, residual });
        }
    }
}

/// Adaptive integration over consecutive segments `[points[k], points[k+1]]`.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(f: F, points: &[f64], abs_tol: f64) -> Result<f64> {
    let segments = points.len().saturating_sub(1).max(1) as f64;
    let mut total = 0.0;
    for pair in points.windows(2) {
        total += integrate_adaptive(&f, pair[0], pair[1], abs_tol / segments)?;
    }
    Ok(total)
}

/// Matrix-valued Gauss–Legendre integration over `[a, b]` starting from
/// `initial_nodes` and doubling until the relative change (Frobenius) falls
/// below `rel_tol`. Returns the integral and the node count used.
pub fn integrate_matrix_adaptive<F>(
    f: F,
    a: f64,
    b: f64,
    initial_nodes: usize,
    rel_tol: f64,
) -> Result<(CMatrix, usize)>
where
    F: Fn(f64) -> Result<CMatrix>,
{
    let rule = |n: usize| -> Result<CMatrix> {
        let gl = GaussLegendre::new(n);
        let mut acc: Option<CMatrix> = None;
        for (x, w) in gl.mapped(a, b) {
            let v = f(x)?.scale(w);
            acc = Some(match acc {
                Some(s) => s + v,
                None => v,
            });
        }
        Ok(acc.expect("rule has at least one node"))
    };
    let mut n = initial_nodes.max(1);
    let mut prev = rule(n)?;
    loop {
        let next_n = n * 2;
        if next_n > MAX_NODES {
            return Err(Error::QuadratureNonConvergence {
                nodes: n,
                residual: f64::NAN,
            });
        }
        let next = rule(next_n)?;
        let scale = next.norm().max(1e-300);
        let residual = (&next - &prev).norm() / scale;
        if residual < rel_tol || (&next - &prev).norm() < 1e-15 {
            return Ok((next, next_n));
        }
        prev = next;
        n = next_n;
    }
}
