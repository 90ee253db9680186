//! Jacobians of vector maps, by dual numbers or central differences.

use super::linalg::{all_finite, Matrix};
use super::scalar::{Dual, Scalar};
use crate::error::{Error, Result};

/// A map `ℝⁿ → ℝᵏ` that can be evaluated over any [`Scalar`].
///
/// Implementors write the arithmetic once; `f64` evaluation gives values and
/// [`Dual`] evaluation gives directional derivatives.
pub trait VectorMap {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn eval<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JacobianMode {
    #[default]
    AutomaticDual,
    CentralFiniteDifference,
}

pub fn jacobian<F: VectorMap + ?Sized>(map: &F, x: &[f64], mode: JacobianMode) -> Result<Matrix> {
    match mode {
        JacobianMode::AutomaticDual => dual_jacobian(map, x),
        JacobianMode::CentralFiniteDifference => central_difference_jacobian(map, x),
    }
}

fn dual_jacobian<F: VectorMap + ?Sized>(map: &F, x: &[f64]) -> Result<Matrix> {
    let n = x.len();
    let k = map.output_dim();
    let mut jac = Matrix::zeros(k, n);
    let mut seeded: Vec<Dual> = x.iter().map(|&v| Dual::cst(v)).collect();
    for col in 0..n {
        seeded[col].eps = 1.0;
        let out = map.eval(&seeded)?;
        seeded[col].eps = 0.0;
        if out.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: out.len(),
            });
        }
        if !all_finite(&out) {
            return Err(Error::NonFiniteEvaluation);
        }
        for (row, d) in out.iter().enumerate() {
            jac[(row, col)] = d.eps;
        }
    }
    Ok(jac)
}

fn central_difference_jacobian<F: VectorMap + ?Sized>(map: &F, x: &[f64]) -> Result<Matrix> {
    let n = x.len();
    let k = map.output_dim();
    let mut jac = Matrix::zeros(k, n);
    let mut probe = x.to_vec();
    for col in 0..n {
        let h = f64::EPSILON.sqrt() * (1.0 + x[col].abs());
        probe[col] = x[col] + h;
        let plus = map.eval(&probe)?;
        probe[col] = x[col] - h;
        let minus = map.eval(&probe)?;
        probe[col] = x[col];
        if !all_finite(&plus) || !all_finite(&minus) {
            return Err(Error::NonFiniteEvaluation);
        }
        for row in 0..k {
            jac[(row, col)] = (plus[row] - minus[row]) / (2.0 * h);
        }
    }
    Ok(jac)
}
