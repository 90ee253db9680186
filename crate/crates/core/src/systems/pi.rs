use crate::dgradients::StorageFunction;
use crate::error::{Error, Result};
use crate::model::{QsrSystem, SupplyRate};
use crate::numerics::{Matrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiParams {
    pub k_i: f64,
    pub k_p: f64,
}

/// PI controller `ż = u, y = k_I z + k_P u`, optionally replicated over
/// independent channels (`n = m = channels`).
#[derive(Clone, Debug)]
pub struct PiController {
    params: PiParams,
    channels: usize,
    supply: SupplyRate,
}

pub fn make_pi(params: PiParams) -> Result<PiController> {
    make_pi_channels(params, 1)
}

pub fn make_pi_channels(params: PiParams, channels: usize) -> Result<PiController> {
    if params.k_i.is_nan() || params.k_p.is_nan() || params.k_i < 0.0 || params.k_p < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "PI gains must be nonnegative, got {params:?}"
        )));
    }
    if channels == 0 {
        return Err(Error::InvalidParameter(
            "PI controller needs at least one channel".into(),
        ));
    }
    let m = channels;
    let supply = SupplyRate::new(
        Matrix::zeros(m, m),
        Matrix::identity(m).scale(0.5),
        Matrix::identity(m).scale(-params.k_p),
    )?;
    Ok(PiController {
        params,
        channels,
        supply,
    })
}

impl PiController {
    pub fn params(&self) -> PiParams {
        self.params
    }

    pub fn channels(&self) -> usize {
        self.channels
    }
}

impl StorageFunction for PiController {
    fn state_dim(&self) -> usize {
        self.channels
    }

    fn energy<T: Scalar>(&self, z: &[T]) -> T {
        T::cst(0.5 * self.params.k_i) * crate::numerics::linalg::norm_sq(z)
    }

    fn energy_gradient<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        z.iter().map(|&v| T::cst(self.params.k_i) * v).collect()
    }
}

impl QsrSystem for PiController {
    fn port_dim(&self) -> usize {
        self.channels
    }

    fn dissipation_dim(&self) -> usize {
        1
    }

    fn supply(&self) -> &SupplyRate {
        &self.supply
    }

    fn drift<T: Scalar>(&self, _z: &[T]) -> Vec<T> {
        vec![T::zero(); self.channels]
    }

    fn input_matrix<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::identity(self.channels)
    }

    fn output<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        self.energy_gradient(z)
    }

    fn feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::identity(self.channels).scale(T::cst(self.params.k_p))
    }

    fn dissipation_output<T: Scalar>(&self, _z: &[T]) -> Vec<T> {
        vec![T::zero()]
    }

    fn dissipation_feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::zeros(1, self.channels)
    }
}
