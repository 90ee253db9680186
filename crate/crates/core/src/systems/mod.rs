//! Benchmark systems and their reference experiment settings.

mod lti_ocp;
mod pendulum;
mod pi;
pub mod riccati;
mod synthetic;

use std::fmt;
use std::str::FromStr;

pub use lti_ocp::{make_lti_ocp, LtiOcp, LtiOcpParams};
pub use pendulum::{make_pendulum, Pendulum, PendulumParams};
pub use pi::{make_pi, make_pi_channels, PiController, PiParams};
pub use riccati::{are_residual, solve_are, solve_are_from_gain};
pub use synthetic::{make_synthetic, Synthetic, SyntheticParams};

use crate::dgradients::StorageFunction;
use crate::error::{Error, Result};
use crate::model::{ControlSignal, QsrSystem, SupplyRate};
use crate::numerics::{Matrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExampleName {
    Pendulum,
    LtiOcp,
    Pi,
    Synthetic,
}

impl ExampleName {
    pub const ALL: [ExampleName; 4] = [
        ExampleName::Pendulum,
        ExampleName::LtiOcp,
        ExampleName::Pi,
        ExampleName::Synthetic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExampleName::Pendulum => "pendulum",
            ExampleName::LtiOcp => "lti-ocp",
            ExampleName::Pi => "pi",
            ExampleName::Synthetic => "synthetic",
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

/// Any of the four benchmark systems behind one concrete type.
#[derive(Clone, Debug)]
pub enum ExampleSystem {
    Pendulum(Pendulum),
    LtiOcp(LtiOcp),
    Pi(PiController),
    Synthetic(Synthetic),
}

macro_rules! dispatch {
    ($self:expr, $sys:ident => $body:expr) => {
        match $self {
            ExampleSystem::Pendulum($sys) => $body,
            ExampleSystem::LtiOcp($sys) => $body,
            ExampleSystem::Pi($sys) => $body,
            ExampleSystem::Synthetic($sys) => $body,
        }
    };
}

impl ExampleSystem {
    pub fn name(&self) -> ExampleName {
        match self {
            ExampleSystem::Pendulum(_) => ExampleName::Pendulum,
            ExampleSystem::LtiOcp(_) => ExampleName::LtiOcp,
            ExampleSystem::Pi(_) => ExampleName::Pi,
            ExampleSystem::Synthetic(_) => ExampleName::Synthetic,
        }
    }
}

impl StorageFunction for ExampleSystem {
    fn state_dim(&self) -> usize {
        dispatch!(self, s => s.state_dim())
    }
    fn energy<T: Scalar>(&self, z: &[T]) -> T {
        dispatch!(self, s => s.energy(z))
    }
    fn energy_gradient<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        dispatch!(self, s => s.energy_gradient(z))
    }
}

impl QsrSystem for ExampleSystem {
    fn port_dim(&self) -> usize {
        dispatch!(self, s => s.port_dim())
    }
    fn dissipation_dim(&self) -> usize {
        dispatch!(self, s => s.dissipation_dim())
    }
    fn supply(&self) -> &SupplyRate {
        dispatch!(self, s => s.supply())
    }
    fn drift<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        dispatch!(self, s => s.drift(z))
    }
    fn input_matrix<T: Scalar>(&self, z: &[T]) -> Matrix<T> {
        dispatch!(self, s => s.input_matrix(z))
    }
    fn output<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        dispatch!(self, s => s.output(z))
    }
    fn feedthrough<T: Scalar>(&self, z: &[T]) -> Matrix<T> {
        dispatch!(self, s => s.feedthrough(z))
    }
    fn dissipation_output<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        dispatch!(self, s => s.dissipation_output(z))
    }
    fn dissipation_feedthrough<T: Scalar>(&self, z: &[T]) -> Matrix<T> {
        dispatch!(self, s => s.dissipation_feedthrough(z))
    }
}

/// System, initial state and control of one benchmark experiment.
#[derive(Clone, Debug)]
pub struct ExampleSetup {
    pub system: ExampleSystem,
    pub initial_state: Vec<f64>,
    pub control: ControlSignal,
}

/// Matrices of the linear-quadratic benchmark plant.
pub fn lti_ocp_benchmark_params() -> LtiOcpParams {
    LtiOcpParams {
        a: Matrix::from_rows(&[&[0.1, 1.0], &[-1.0, 0.1]]),
        b: Matrix::from_rows(&[&[0.0], &[1.0]]),
        c: Matrix::from_rows(&[&[1.0, 0.0]]),
    }
}

/// Reference experiment settings for each benchmark.
///
/// | example   | parameters                   | `z₀`        | `u(t)`                          |
/// |-----------|------------------------------|-------------|---------------------------------|
/// | pendulum  | `g = 9.81, λ = 0.2`          | `(π/4, −1)` | `sin(2t)`                       |
/// | lti-ocp   | `A, B, C` of the LQ plant    | `(1, 1)`    | `sin(t²/4)`                     |
/// | pi        | `k_I = k_P = 1`              | `1`         | `min(t², e^{−t})`               |
/// | synthetic | `λ = 1, α = 2`               | `1`         | `e^{−(t−4)²} + e^{−(t−7)²}`     |
pub fn reference_settings(name: ExampleName) -> Result<ExampleSetup> {
    reference_settings_with_pi_channels(name, 1)
}

/// As [`reference_settings`], with the PI controller replicated over
/// `pi_channels` channels (`z₀ = (1, …, 1)`). Other examples ignore the count.
pub fn reference_settings_with_pi_channels(name: ExampleName, pi_channels: usize) -> Result<ExampleSetup> {
    Ok(match name {
        ExampleName::Pendulum => ExampleSetup {
            system: ExampleSystem::Pendulum(make_pendulum(PendulumParams { g: 9.81, lambda: 0.2 })?),
            initial_state: vec![std::f64::consts::FRAC_PI_4, -1.0],
            control: ControlSignal::scalar(1, |t| (2.0 * t).sin()),
        },
        ExampleName::LtiOcp => ExampleSetup {
            system: ExampleSystem::LtiOcp(make_lti_ocp(lti_ocp_benchmark_params())?),
            initial_state: vec![1.0, 1.0],
            control: ControlSignal::scalar(1, |t| (t * t / 4.0).sin()),
        },
        ExampleName::Pi => ExampleSetup {
            system: ExampleSystem::Pi(make_pi_channels(PiParams { k_i: 1.0, k_p: 1.0 }, pi_channels)?),
            initial_state: vec![1.0; pi_channels],
            control: ControlSignal::scalar(pi_channels, |t| (t * t).min((-t).exp())),
        },
        ExampleName::Synthetic => ExampleSetup {
            system: ExampleSystem::Synthetic(make_synthetic(SyntheticParams {
                alpha: 2.0,
                lambda: 1.0,
            })?),
            initial_state: vec![1.0],
            control: ControlSignal::scalar(1, |t| (-(t - 4.0).powi(2)).exp() + (-(t - 7.0).powi(2)).exp()),
        },
    })
}

/// Look up settings by name string.
pub fn reference_settings_by_name(name: &str) -> Result<ExampleSetup> {
    reference_settings(name.parse()?)
}
