use super::riccati::solve_are;
use crate::dgradients::StorageFunction;
use crate::error::{Error, Result};
use crate::model::{QsrSystem, SupplyRate};
use crate::numerics::{Matrix, Scalar};

/// Plant matrices of `ż = Az + Bu, y = Cz`.
#[derive(Clone, Debug, PartialEq)]
pub struct LtiOcpParams {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

/// Linear plant viewed through the value function `Ĥ(z) = ½zᵀP_c z` of the
/// infinite-horizon problem `½∫‖y‖² + ‖u‖² dt`.
///
/// The output is `ŷ = BᵀP_c z`, the supply rate `½‖ŷ‖² + ŷᵀu`
/// (`Q = S = ½I`, `R = 0`), and `ℓ(z) = Cz/√2`.
#[derive(Clone, Debug)]
pub struct LtiOcp {
    params: LtiOcpParams,
    riccati: Matrix,
    supply: SupplyRate,
}

pub fn make_lti_ocp(params: LtiOcpParams) -> Result<LtiOcp> {
    let p = solve_are(&params.a, &params.b, &params.c)?;
    LtiOcp::with_riccati_solution(params, p)
}

impl LtiOcp {
    /// Build from an already computed Riccati solution.
    pub fn with_riccati_solution(params: LtiOcpParams, riccati: Matrix) -> Result<Self> {
        let n = params.a.rows();
        if riccati.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: riccati.rows(),
            });
        }
        let m = params.b.cols();
        let half = Matrix::identity(m).scale(0.5);
        let supply = SupplyRate::new(half.clone(), half, Matrix::zeros(m, m))?;
        Ok(LtiOcp {
            params,
            riccati,
            supply,
        })
    }

    pub fn params(&self) -> &LtiOcpParams {
        &self.params
    }

    /// `P_c`.
    pub fn riccati_solution(&self) -> &Matrix {
        &self.riccati
    }
}

impl StorageFunction for LtiOcp {
    fn state_dim(&self) -> usize {
        self.params.a.rows()
    }

    fn energy<T: Scalar>(&self, z: &[T]) -> T {
        let pz = self.riccati.lift::<T>().mul_vec(z);
        T::cst(0.5) * crate::numerics::linalg::dot(z, &pz)
    }

    fn energy_gradient<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        self.riccati.lift::<T>().mul_vec(z)
    }
}

impl QsrSystem for LtiOcp {
    fn port_dim(&self) -> usize {
        self.params.b.cols()
    }

    fn dissipation_dim(&self) -> usize {
        self.params.c.rows()
    }

    fn supply(&self) -> &SupplyRate {
        &self.supply
    }

    fn drift<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        self.params.a.lift::<T>().mul_vec(z)
    }

    fn input_matrix<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        self.params.b.lift()
    }

    fn output<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        let pz = self.energy_gradient(z);
        self.params.b.lift::<T>().tr_mul_vec(&pz)
    }

    fn feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        let m = self.port_dim();
        Matrix::zeros(m, m)
    }

    fn dissipation_output<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        let scale = T::cst(std::f64::consts::FRAC_1_SQRT_2);
        self.params
            .c
            .lift::<T>()
            .mul_vec(z)
            .into_iter()
            .map(|v| scale * v)
            .collect()
    }

    fn dissipation_feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::zeros(self.dissipation_dim(), self.port_dim())
    }
}
