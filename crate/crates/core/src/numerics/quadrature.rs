//! Gauss–Legendre quadrature on `[0, 1]`.

use std::sync::OnceLock;

use super::linalg::all_finite;
use super::scalar::Scalar;
use crate::error::{Error, Result};

pub const MAX_GAUSS_ORDER: usize = 10;

/// Nodes and weights of one Gauss–Legendre rule mapped to `[0, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn build_rule(order: usize) -> GaussRule {
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for i in 1..=order {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (order as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(order, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(order, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(0.5 * (1.0 + x));
        weights.push(0.5 * w);
    }
    GaussRule { nodes, weights }
}

/// Rule of the given order (number of nodes), `1 ≤ order ≤ 10`.
pub fn gauss_rule(order: usize) -> Result<&'static GaussRule> {
    static RULES: OnceLock<Vec<GaussRule>> = OnceLock::new();
    if !(1..=MAX_GAUSS_ORDER).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Legendre order must be in 1..={MAX_GAUSS_ORDER}, got {order}"
        )));
    }
    let rules = RULES.get_or_init(|| (1..=MAX_GAUSS_ORDER).map(build_rule).collect());
    Ok(&rules[order - 1])
}

/// Approximate `∫₀¹ f(s) ds` for a vector-valued integrand.
pub fn gauss_legendre<T: Scalar>(f: impl Fn(f64) -> Vec<T>, order: usize) -> Result<Vec<T>> {
    let rule = gauss_rule(order)?;
    let mut acc: Option<Vec<T>> = None;
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(s);
        if !all_finite(&v) {
            return Err(Error::NonFiniteEvaluation);
        }
        match acc.as_mut() {
            None => acc = Some(v.into_iter().map(|x| T::cst(w) * x).collect()),
            Some(a) => {
                if a.len() != v.len() {
                    return Err(Error::DimensionMismatch {
                        expected: a.len(),
                        found: v.len(),
                    });
                }
                for (ai, vi) in a.iter_mut().zip(v) {
                    *ai += T::cst(w) * vi;
                }
            }
        }
    }
    Ok(acc.unwrap_or_default())
}
