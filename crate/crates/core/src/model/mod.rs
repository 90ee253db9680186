//! QSR-dissipative input-state-output systems
//!
//! ```text
//! ż = f(z) + B(z) u,    y = h(z) + D(z) u
//! ```
//!
//! with storage function `H`, supply rate `s(u, y) = yᵀQy + 2yᵀSu + uᵀRu`
//! and the factorization maps `ℓ`, `W` of the Hill–Moylan conditions.

use std::fmt;
use std::sync::Arc;

use crate::dgradients::StorageFunction;
use crate::error::{Error, Result};
use crate::numerics::linalg::{add, check_dim, dot, norm, norm_sq, sub};
use crate::numerics::{Matrix, Scalar};

/// Quadratic supply rate matrices `(Q, S, R)`, all `m × m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupplyRate {
    q: Matrix,
    s: Matrix,
    r: Matrix,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl SupplyRate {
    pub fn new(q: Matrix, s: Matrix, r: Matrix) -> Result<Self> {
        let m = q.rows();
        for mat in [&q, &s, &r] {
            if mat.shape() != (m, m) {
                return Err(Error::InvalidParameter(format!(
                    "supply rate matrices must all be {m}x{m}, found {:?}",
                    mat.shape()
                )));
            }
        }
        if q.asymmetry() > SYMMETRY_TOL || r.asymmetry() > SYMMETRY_TOL {
            return Err(Error::InvalidParameter("Q and R must be symmetric".into()));
        }
        Ok(SupplyRate { q, s, r })
    }

    /// Scalar (`m = 1`) supply rate.
    pub fn scalar(q: f64, s: f64, r: f64) -> Self {
        SupplyRate {
            q: Matrix::scalar(q),
            s: Matrix::scalar(s),
            r: Matrix::scalar(r),
        }
    }

    /// Impedance supply `yᵀu`.
    pub fn passivity(m: usize) -> Self {
        SupplyRate {
            q: Matrix::zeros(m, m),
            s: Matrix::identity(m).scale(0.5),
            r: Matrix::zeros(m, m),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    /// `s(u, y) = yᵀQy + 2yᵀSu + uᵀRu`.
    pub fn value<T: Scalar>(&self, u: &[T], y: &[T]) -> T {
        let q = self.q.lift::<T>();
        let s = self.s.lift::<T>();
        let r = self.r.lift::<T>();
        dot(y, &q.mul_vec(y)) + T::cst(2.0) * dot(y, &s.mul_vec(u)) + dot(u, &r.mul_vec(u))
    }
}

/// Free function form of [`SupplyRate::value`].
pub fn supply_value(supply: &SupplyRate, u: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(supply.dim(), u.len())?;
    check_dim(supply.dim(), y.len())?;
    Ok(supply.value(u, y))
}

/// A QSR-dissipative system.
///
/// Dimensions: state `n`, ports `m` (inputs = outputs), dissipation output `p`.
/// All maps are generic over [`Scalar`] so that Jacobians of discretized
/// dynamics can be formed exactly with dual numbers.
pub trait QsrSystem: StorageFunction + Send + Sync {
    fn port_dim(&self) -> usize;
    fn dissipation_dim(&self) -> usize;
    fn supply(&self) -> &SupplyRate;

    /// `f(z)`.
    fn drift<T: Scalar>(&self, z: &[T]) -> Vec<T>;
    /// `B(z)`, `n × m`.
    fn input_matrix<T: Scalar>(&self, z: &[T]) -> Matrix<T>;
    /// `h(z)`.
    fn output<T: Scalar>(&self, z: &[T]) -> Vec<T>;
    /// `D(z)`, `m × m`.
    fn feedthrough<T: Scalar>(&self, z: &[T]) -> Matrix<T>;
    /// `ℓ(z)`, length `p`.
    fn dissipation_output<T: Scalar>(&self, z: &[T]) -> Vec<T>;
    /// `W(z)`, `p × m`.
    fn dissipation_feedthrough<T: Scalar>(&self, z: &[T]) -> Matrix<T>;

    /// `y = h(z) + D(z) u`.
    fn full_output(&self, z: &[f64], u: &[f64]) -> Vec<f64> {
        add(&self.output(z), &self.feedthrough(z).mul_vec(u))
    }

    /// `f(z) + B(z) u`.
    fn vector_field(&self, z: &[f64], u: &[f64]) -> Vec<f64> {
        add(&self.drift(z), &self.input_matrix(z).mul_vec(u))
    }
}

fn check_state_and_input<S: QsrSystem + ?Sized>(sys: &S, z: &[f64], u: Option<&[f64]>) -> Result<()> {
    check_dim(sys.state_dim(), z.len())?;
    if let Some(u) = u {
        check_dim(sys.port_dim(), u.len())?;
    }
    Ok(())
}

/// `d(z, u) = ‖ℓ(z) + W(z) u‖²`.
pub fn dissipation_rate<S: QsrSystem + ?Sized>(sys: &S, z: &[f64], u: &[f64]) -> Result<f64> {
    check_state_and_input(sys, z, Some(u))?;
    let v = add(&sys.dissipation_output(z), &sys.dissipation_feedthrough(z).mul_vec(u));
    Ok(norm_sq(&v))
}

/// Absolute residuals of the three Hill–Moylan conditions at `z`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct HillMoylanResidual {
    /// `|ηᵀf − hᵀQh + ℓᵀℓ|`
    pub energy: f64,
    /// `‖½Bᵀη − (QD + S)ᵀh + Wᵀℓ‖`
    pub port: f64,
    /// `‖WᵀW − R − DᵀS − SᵀD − DᵀQD‖_F`
    pub feedthrough: f64,
}

impl HillMoylanResidual {
    pub fn max(&self) -> f64 {
        self.energy.max(self.port).max(self.feedthrough)
    }

    pub fn componentwise_max(self, other: Self) -> Self {
        HillMoylanResidual {
            energy: self.energy.max(other.energy),
            port: self.port.max(other.port),
            feedthrough: self.feedthrough.max(other.feedthrough),
        }
    }
}

impl fmt::Display for HillMoylanResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r1={:.3e} r2={:.3e} r3={:.3e}",
            self.energy, self.port, self.feedthrough
        )
    }
}

pub fn hill_moylan_residual<S: QsrSystem + ?Sized>(sys: &S, z: &[f64]) -> Result<HillMoylanResidual> {
    check_state_and_input(sys, z, None)?;
    let supply = sys.supply();
    let (q, s, r) = (supply.q(), supply.s(), supply.r());
    let eta = sys.energy_gradient(z);
    let f = sys.drift(z);
    let b = sys.input_matrix(z);
    let h = sys.output(z);
    let d = sys.feedthrough(z);
    let ell = sys.dissipation_output(z);
    let w = sys.dissipation_feedthrough(z);

    let energy = (dot(&eta, &f) - dot(&h, &q.mul_vec(&h)) + norm_sq(&ell)).abs();

    let qd_s = q.matmul(&d).add(s);
    let half_bt_eta: Vec<f64> = b.tr_mul_vec(&eta).iter().map(|v| 0.5 * v).collect();
    let port_vec = add(&sub(&half_bt_eta, &qd_s.tr_mul_vec(&h)), &w.tr_mul_vec(&ell));
    let port = norm(&port_vec);

    let dt = d.transpose();
    let rhs = r
        .add(&dt.matmul(s))
        .add(&s.transpose().matmul(&d))
        .add(&dt.matmul(q).matmul(&d));
    let feedthrough = w.transpose().matmul(&w).sub(&rhs).frobenius_norm();

    Ok(HillMoylanResidual {
        energy,
        port,
        feedthrough,
    })
}

/// `|ηᵀ(f + Bu) − s(u, y) + d(z, u)|` with `y = h(z) + D(z)u`.
pub fn continuous_power_balance_residual<S: QsrSystem + ?Sized>(sys: &S, z: &[f64], u: &[f64]) -> Result<f64> {
    check_state_and_input(sys, z, Some(u))?;
    let eta = sys.energy_gradient(z);
    let power = dot(&eta, &sys.vector_field(z, u));
    let y = sys.full_output(z, u);
    let supply = sys.supply().value(u, &y);
    let diss = dissipation_rate(sys, z, u)?;
    Ok((power - supply + diss).abs())
}

/// `det(Q D(z) + S)`; must stay away from zero for the scheme to be defined.
pub fn port_matrix_determinant<S: QsrSystem + ?Sized>(sys: &S, z: &[f64]) -> Result<f64> {
    check_state_and_input(sys, z, None)?;
    let supply = sys.supply();
    Ok(supply.q().matmul(&sys.feedthrough(z)).add(supply.s()).determinant())
}

/// Input signal `u : [0, T] → ℝᵐ`.
#[derive(Clone)]
pub struct ControlSignal {
    dim: usize,
    func: Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
}

impl ControlSignal {
    pub fn new(dim: usize, func: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        ControlSignal {
            dim,
            func: Arc::new(func),
        }
    }

    /// Scalar signal, broadcast to `dim` identical channels.
    pub fn scalar(dim: usize, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ControlSignal::new(dim, move |t| vec![func(t); dim])
    }

    pub fn zero(dim: usize) -> Self {
        ControlSignal::new(dim, move |_| vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let v = (self.func)(t);
        debug_assert_eq!(v.len(), self.dim);
        v
    }

    /// Largest jump `‖u(t_{k+1}) − u(t_k)‖` over `samples` equal subintervals of `[0, horizon]`.
    pub fn max_sampled_jump(&self, horizon: f64, samples: usize) -> f64 {
        let samples = samples.max(1);
        let mut prev = self.eval(0.0);
        let mut worst = 0.0_f64;
        for k in 1..=samples {
            let next = self.eval(horizon * k as f64 / samples as f64);
            worst = worst.max(norm(&sub(&next, &prev)));
            prev = next;
        }
        worst
    }
}

impl fmt::Debug for ControlSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlSignal")
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}
