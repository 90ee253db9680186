use crate::dgradients::StorageFunction;
use crate::error::{Error, Result};
use crate::model::{QsrSystem, SupplyRate};
use crate::numerics::{Matrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PendulumParams {
    /// Gravitational constant (m/s²).
    pub g: f64,
    /// Friction coefficient (1/s), nonnegative.
    pub lambda: f64,
}

/// Forced damped pendulum `θ̈ = −g sin θ − λθ̇ + u` with state `z = (θ, θ̇)`
/// and collocated output `y = θ̇`.
#[derive(Clone, Debug)]
pub struct Pendulum {
    params: PendulumParams,
    supply: SupplyRate,
}

pub fn make_pendulum(params: PendulumParams) -> Result<Pendulum> {
    if params.lambda.is_nan() || params.lambda < 0.0 || !params.g.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "pendulum needs lambda >= 0 and finite g, got {params:?}"
        )));
    }
    Ok(Pendulum {
        params,
        supply: SupplyRate::scalar(-params.lambda, 0.5, 0.0),
    })
}

impl Pendulum {
    pub fn params(&self) -> PendulumParams {
        self.params
    }
}

impl StorageFunction for Pendulum {
    fn state_dim(&self) -> usize {
        2
    }

    fn energy<T: Scalar>(&self, z: &[T]) -> T {
        T::cst(self.params.g) * (T::one() - z[0].cos()) + T::cst(0.5) * z[1] * z[1]
    }

    fn energy_gradient<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        vec![T::cst(self.params.g) * z[0].sin(), z[1]]
    }
}

impl QsrSystem for Pendulum {
    fn port_dim(&self) -> usize {
        1
    }

    fn dissipation_dim(&self) -> usize {
        1
    }

    fn supply(&self) -> &SupplyRate {
        &self.supply
    }

    fn drift<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        let g = T::cst(self.params.g);
        let lambda = T::cst(self.params.lambda);
        vec![z[1], -g * z[0].sin() - lambda * z[1]]
    }

    fn input_matrix<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::column(&[T::zero(), T::one()])
    }

    fn output<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        vec![z[1]]
    }

    fn feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::zeros(1, 1)
    }

    fn dissipation_output<T: Scalar>(&self, _z: &[T]) -> Vec<T> {
        vec![T::zero()]
    }

    fn dissipation_feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::zeros(1, 1)
    }
}
