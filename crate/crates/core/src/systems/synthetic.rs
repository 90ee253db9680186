use crate::dgradients::StorageFunction;
use crate::error::{Error, Result};
use crate::model::{QsrSystem, SupplyRate};
use crate::numerics::{Matrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticParams {
    pub alpha: f64,
    pub lambda: f64,
}

/// Scalar system
///
/// ```text
/// ż = −z − αz/(1+z⁴) + 2λu,   y = −αz/(1+z⁴) + λu
/// ```
///
/// with `H(z) = (α/2)·arctan(z²)`, supply `−y² + λ²u²` and
/// `ℓ(z) = √α·z/√(1+z⁴)`. The output sign makes `h = −∇H`, which is the
/// choice satisfying the Hill–Moylan conditions with `B = 2λ`, `D = λ`.
#[derive(Clone, Debug)]
pub struct Synthetic {
    params: SyntheticParams,
    supply: SupplyRate,
}

pub fn make_synthetic(params: SyntheticParams) -> Result<Synthetic> {
    if params.alpha.is_nan() || params.alpha <= 0.0 || params.lambda == 0.0 || !params.lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "synthetic example needs alpha > 0 and lambda != 0, got {params:?}"
        )));
    }
    Ok(Synthetic {
        params,
        supply: SupplyRate::scalar(-1.0, 0.0, params.lambda * params.lambda),
    })
}

impl Synthetic {
    pub fn params(&self) -> SyntheticParams {
        self.params
    }

    fn ratio<T: Scalar>(&self, z: T) -> T {
        T::cst(self.params.alpha) * z / (T::one() + z.powi(4))
    }
}

impl StorageFunction for Synthetic {
    fn state_dim(&self) -> usize {
        1
    }

    fn energy<T: Scalar>(&self, z: &[T]) -> T {
        T::cst(0.5 * self.params.alpha) * (z[0] * z[0]).atan()
    }

    fn energy_gradient<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        vec![self.ratio(z[0])]
    }
}

impl QsrSystem for Synthetic {
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
        vec![-z[0] - self.ratio(z[0])]
    }

    fn input_matrix<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::scalar(T::cst(2.0 * self.params.lambda))
    }

    fn output<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        vec![-self.ratio(z[0])]
    }

    fn feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::scalar(T::cst(self.params.lambda))
    }

    fn dissipation_output<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        let alpha = T::cst(self.params.alpha);
        vec![alpha.sqrt() * z[0] / (T::one() + z[0].powi(4)).sqrt()]
    }

    fn dissipation_feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::zeros(1, 1)
    }
}
