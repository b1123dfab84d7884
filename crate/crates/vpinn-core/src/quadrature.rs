//! Gauss-type quadrature rules on `[-1, 1]`.
//!
//! Gauss-Legendre with `Q` nodes integrates polynomials up to degree `2Q - 1`
//! exactly; Gauss-Lobatto (which pins the endpoints) reaches degree `2Q - 3`.
//! Nodes come from Newton iteration on `P_Q` (resp. `P'_{Q-1}`), seeded with
//! the usual Chebyshev-angle estimates. Only the positive half is solved for;
//! the negative half is mirrored so rules are exactly symmetric.

use crate::basis::legendre_eval;
use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    GaussLegendre,
    GaussLobatto,
}

/// Nodes (strictly increasing) and positive weights of a rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: QuadKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `sum_q W_q f(x_q)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Build a rule with `q >= 2` nodes.
pub fn gauss_rule(kind: QuadKind, q: usize) -> Result<QuadratureRule> {
    if q < 2 {
        return Err(Error::Config(format!("quadrature order {q} < 2")));
    }
    let (nodes, weights) = match kind {
        QuadKind::GaussLegendre => gauss_legendre(q)?,
        QuadKind::GaussLobatto => gauss_lobatto(q)?,
    };
    Ok(QuadratureRule {
        kind,
        nodes,
        weights,
    })
}

fn gauss_legendre(q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    // Positive-half roots of P_q, largest first: i = 1 .. q/2.
    for i in 1..=q / 2 {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (q as f64 + 0.5)).cos();
        let x = newton_root(guess, i, q, |x| {
            let (p, d, _) = legendre_eval(q, x);
            (p, d)
        })?;
        let (_, d, _) = legendre_eval(q, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[q - i] = x;
        weights[q - i] = w;
        nodes[i - 1] = -x;
        weights[i - 1] = w;
    }
    if q % 2 == 1 {
        // P_q is odd: the middle node is exactly zero.
        let (_, d, _) = legendre_eval(q, 0.0);
        nodes[q / 2] = 0.0;
        weights[q / 2] = 2.0 / (d * d);
    }
    Ok((nodes, weights))
}

fn gauss_lobatto(q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = q - 1; // interior nodes are roots of P_n'
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let endpoint_w = 2.0 / (q as f64 * n as f64);
    nodes[0] = -1.0;
    nodes[q - 1] = 1.0;
    weights[0] = endpoint_w;
    weights[q - 1] = endpoint_w;
    let interior = n - 1;
    for i in 1..=interior / 2 {
        let guess = (std::f64::consts::PI * i as f64 / n as f64).cos();
        let x = newton_root(guess, i, q, |x| {
            let (_, d, s) = legendre_eval(n, x);
            (d, s)
        })?;
        let (p, _, _) = legendre_eval(n, x);
        let w = endpoint_w / (p * p);
        nodes[q - 1 - i] = x;
        weights[q - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if interior % 2 == 1 {
        let (p, _, _) = legendre_eval(n, 0.0);
        nodes[q / 2] = 0.0;
        weights[q / 2] = endpoint_w / (p * p);
    }
    Ok((nodes, weights))
}

fn newton_root(
    guess: f64,
    node: usize,
    order: usize,
    mut fd: impl FnMut(f64) -> (f64, f64),
) -> Result<f64> {
    let mut x = guess;
    for _ in 0..NEWTON_MAX_ITERS {
        let (f, d) = fd(x);
        let step = f / d;
        x -= step;
        if step.abs() < NEWTON_TOL {
            return Ok(x);
        }
    }
    Err(Error::RootFinding { order, node })
}
