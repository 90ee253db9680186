//! Discrete gradients: two-point maps `∇̄H(z, w)` with
//! `H(w) − H(z) = ∇̄H(z, w)ᵀ(w − z)` and `∇̄H(z, z) = ∇H(z)`.

use crate::error::{Error, Result};
use crate::numerics::linalg::{dot, midpoint, norm_sq, sub, value_norm, values};
use crate::numerics::quadrature::{gauss_legendre, MAX_GAUSS_ORDER};
use crate::numerics::Scalar;

/// Storage function `H` together with its analytic gradient `η = ∇H`.
pub trait StorageFunction {
    fn state_dim(&self) -> usize;
    fn energy<T: Scalar>(&self, z: &[T]) -> T;
    fn energy_gradient<T: Scalar>(&self, z: &[T]) -> Vec<T>;
}

impl<S: StorageFunction + ?Sized> StorageFunction for &S {
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn energy<T: Scalar>(&self, z: &[T]) -> T {
        (**self).energy(z)
    }
    fn energy_gradient<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        (**self).energy_gradient(z)
    }
}

pub const DEFAULT_MEAN_VALUE_ORDER: usize = 5;

/// Relative separation below which the Gonzalez correction term is dropped.
const GONZALEZ_COINCIDENCE: f64 = 1e-12;
/// Per-coordinate threshold for the Itoh–Abe `0/0` case.
const ITOH_ABE_DEGENERATE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiscreteGradientKind {
    /// Midpoint gradient plus a rank-one correction along `w − z`.
    #[default]
    Gonzalez,
    /// Coordinate-wise difference quotients.
    ItohAbe,
    /// Gauss–Legendre approximation of `∫₀¹ ∇H((1−s)z + sw) ds`.
    MeanValue { order: usize },
}

impl DiscreteGradientKind {
    pub fn mean_value() -> Self {
        DiscreteGradientKind::MeanValue {
            order: DEFAULT_MEAN_VALUE_ORDER,
        }
    }

    /// Whether `∇̄H(z, w) = ∇̄H(w, z)` holds for this construction.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, DiscreteGradientKind::ItohAbe)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DiscreteGradientKind::MeanValue { order } if !(1..=MAX_GAUSS_ORDER).contains(&order) => {
                Err(Error::InvalidParameter(format!(
                    "mean-value quadrature order must be in 1..={MAX_GAUSS_ORDER}, got {order}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DiscreteGradientKind::Gonzalez => "gonzalez",
            DiscreteGradientKind::ItohAbe => "itoh-abe",
            DiscreteGradientKind::MeanValue { .. } => "mean-value",
        }
    }
}

impl std::str::FromStr for DiscreteGradientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gonzalez" => Ok(DiscreteGradientKind::Gonzalez),
            "itoh-abe" => Ok(DiscreteGradientKind::ItohAbe),
            "mean-value" => Ok(DiscreteGradientKind::mean_value()),
            other => Err(Error::InvalidParameter(format!("unknown discrete gradient `{other}`"))),
        }
    }
}

/// Evaluate `∇̄H(z, w)`.
pub fn discrete_gradient<H, T>(kind: DiscreteGradientKind, storage: &H, z: &[T], w: &[T]) -> Result<Vec<T>>
where
    H: StorageFunction + ?Sized,
    T: Scalar,
{
    let n = storage.state_dim();
    crate::numerics::linalg::check_dim(n, z.len())?;
    crate::numerics::linalg::check_dim(n, w.len())?;
    match kind {
        DiscreteGradientKind::Gonzalez => Ok(gonzalez(storage, z, w)),
        DiscreteGradientKind::ItohAbe => Ok(itoh_abe(storage, z, w)),
        DiscreteGradientKind::MeanValue { order } => mean_value(storage, z, w, order),
    }
}

fn gonzalez<H: StorageFunction + ?Sized, T: Scalar>(storage: &H, z: &[T], w: &[T]) -> Vec<T> {
    let mid = midpoint(z, w);
    let mut grad = storage.energy_gradient(&mid);
    let d = sub(w, z);
    if value_norm(&d) <= GONZALEZ_COINCIDENCE * (1.0 + value_norm(z)) {
        return grad;
    }
    let coeff = (storage.energy(w) - storage.energy(z) - dot(&grad, &d)) / norm_sq(&d);
    for (g, di) in grad.iter_mut().zip(&d) {
        *g += coeff * *di;
    }
    grad
}

fn itoh_abe<H: StorageFunction + ?Sized, T: Scalar>(storage: &H, z: &[T], w: &[T]) -> Vec<T> {
    let n = z.len();
    let mut out = Vec::with_capacity(n);
    // `point` walks from z to w one coordinate at a time.
    let mut point = z.to_vec();
    let mut h_prev = storage.energy(&point);
    for k in 0..n {
        let dk = w[k] - z[k];
        if dk.value().abs() <= ITOH_ABE_DEGENERATE * (1.0 + z[k].value().abs()) {
            // 0/0: partial derivative at the partially updated point.
            out.push(storage.energy_gradient(&point)[k]);
            point[k] = w[k];
            h_prev = storage.energy(&point);
        } else {
            point[k] = w[k];
            let h_next = storage.energy(&point);
            out.push((h_next - h_prev) / dk);
            h_prev = h_next;
        }
    }
    out
}

fn mean_value<H: StorageFunction + ?Sized, T: Scalar>(storage: &H, z: &[T], w: &[T], order: usize) -> Result<Vec<T>> {
    gauss_legendre(
        |s| {
            let p: Vec<T> = z
                .iter()
                .zip(w)
                .map(|(&zi, &wi)| T::cst(1.0 - s) * zi + T::cst(s) * wi)
                .collect();
            storage.energy_gradient(&p)
        },
        order,
    )
}

/// `|H(w) − H(z) − ∇̄H(z,w)ᵀ(w−z)| / (1 + |H(w) − H(z)|)`.
pub fn check_mean_value<H: StorageFunction + ?Sized>(
    kind: DiscreteGradientKind,
    storage: &H,
    z: &[f64],
    w: &[f64],
) -> Result<f64> {
    let g = discrete_gradient(kind, storage, z, w)?;
    let dh = storage.energy(w) - storage.energy(z);
    let d = sub(w, z);
    Ok((dh - dot(&g, &d)).abs() / (1.0 + dh.abs()))
}

/// `‖∇̄H(z, z) − ∇H(z)‖`.
pub fn consistency_error<H: StorageFunction + ?Sized>(
    kind: DiscreteGradientKind,
    storage: &H,
    z: &[f64],
) -> Result<f64> {
    let g = discrete_gradient(kind, storage, z, z)?;
    let eta = storage.energy_gradient(z);
    Ok(crate::numerics::linalg::norm(&sub(&g, &eta)))
}

/// Real parts of a discrete gradient; convenience for diagnostics.
pub fn discrete_gradient_values<H: StorageFunction + ?Sized>(
    kind: DiscreteGradientKind,
    storage: &H,
    z: &[f64],
    w: &[f64],
) -> Result<Vec<f64>> {
    discrete_gradient(kind, storage, z, w).map(|g| values(&g))
}
