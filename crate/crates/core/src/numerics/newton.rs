use super::diff::{jacobian, JacobianMode, VectorMap};
use super::linalg::{all_finite, norm, solve_dense};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonSettings {
    /// Maximum number of Newton updates; must be at least one.
    pub max_iterations: usize,
    /// Stop as soon as `‖F(x)‖ ≤ residual_tolerance`.
    pub residual_tolerance: f64,
    pub jacobian_mode: JacobianMode,
}

impl Default for NewtonSettings {
    /// Ten updates with early exit at a residual of `1e-13`.
    fn default() -> Self {
        NewtonSettings {
            max_iterations: 10,
            residual_tolerance: 1e-13,
            jacobian_mode: JacobianMode::AutomaticDual,
        }
    }
}

impl NewtonSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if self.residual_tolerance.is_nan() || self.residual_tolerance < 0.0 {
            return Err(Error::InvalidParameter("residual_tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub solution: Vec<f64>,
    /// Number of updates performed.
    pub iterations: usize,
    /// `‖F(solution)‖`.
    pub residual: f64,
    pub converged: bool,
}

/// Plain Newton iteration `x ← x − J(x)⁻¹ F(x)` without globalization.
///
/// Hitting `max_iterations` is not an error: the last iterate is returned
/// with `converged == false` so callers can decide.
pub fn newton_solve<F: VectorMap + ?Sized>(map: &F, x0: &[f64], settings: &NewtonSettings) -> Result<NewtonOutcome> {
    settings.validate()?;
    if map.input_dim() != map.output_dim() {
        return Err(Error::DimensionMismatch {
            expected: map.input_dim(),
            found: map.output_dim(),
        });
    }
    if x0.len() != map.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: map.input_dim(),
            found: x0.len(),
        });
    }

    let mut x = x0.to_vec();
    let mut iterations = 0;
    loop {
        let fx = map.eval(&x)?;
        if !all_finite(&fx) {
            return Err(Error::NonFiniteEvaluation);
        }
        let residual = norm(&fx);
        if residual <= settings.residual_tolerance || iterations == settings.max_iterations {
            return Ok(NewtonOutcome {
                solution: x,
                iterations,
                residual,
                converged: residual <= settings.residual_tolerance,
            });
        }
        let jac = jacobian(map, &x, settings.jacobian_mode)?;
        let step = solve_dense(&jac, &fx)?;
        for (xi, di) in x.iter_mut().zip(&step) {
            *xi -= di;
        }
        if !all_finite(&x) {
            return Err(Error::NonFiniteEvaluation);
        }
        iterations += 1;
    }
}
