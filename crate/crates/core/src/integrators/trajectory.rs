use super::grid::TimeGrid;
use super::scheme::{step, MidpointAverages, SchemeConfig, SchemeKind};
use crate::error::{Error, Result};
use crate::model::{ControlSignal, QsrSystem};
use crate::numerics::linalg::{add, check_dim, norm, norm_sq, sub};

/// Discrete solution on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub scheme: SchemeKind,
    pub grid: TimeGrid,
    /// `z_0 … z_q`
    pub states: Vec<Vec<f64>>,
    /// `ū_0 … ū_{q−1}`
    pub averaged_inputs: Vec<Vec<f64>>,
    /// `ȳ_0 … ȳ_{q−1}`
    pub discrete_outputs: Vec<Vec<f64>>,
    pub newton_residuals: Vec<f64>,
    pub newton_iterations: Vec<usize>,
    /// Indices of steps whose Newton solve stopped above tolerance.
    pub unconverged_steps: Vec<usize>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        &self.states[self.states.len() - 1]
    }

    pub fn max_newton_residual(&self) -> f64 {
        self.newton_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }
}

/// Apply the configured one-step method on every interval of `grid`.
pub fn integrate<S: QsrSystem + ?Sized>(
    sys: &S,
    cfg: &SchemeConfig,
    grid: &TimeGrid,
    u: &ControlSignal,
    z0: &[f64],
) -> Result<Trajectory> {
    cfg.validate()?;
    check_dim(sys.state_dim(), z0.len())?;
    check_dim(sys.port_dim(), u.dim())?;
    if !z0.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteEvaluation);
    }
    let q = grid.steps();
    let mut traj = Trajectory {
        scheme: cfg.scheme,
        grid: grid.clone(),
        states: Vec::with_capacity(q + 1),
        averaged_inputs: Vec::with_capacity(q),
        discrete_outputs: Vec::with_capacity(q),
        newton_residuals: Vec::with_capacity(q),
        newton_iterations: Vec::with_capacity(q),
        unconverged_steps: Vec::new(),
    };
    traj.states.push(z0.to_vec());
    for i in 0..q {
        let t = grid.points()[i];
        let tau = grid.step_size(i);
        let current = &traj.states[i];
        let out = step(sys, cfg, current, t, tau, u).map_err(|e| Error::StepFailed {
            index: i,
            source: Box::new(e),
        })?;
        if !out.converged {
            traj.unconverged_steps.push(i);
        }
        traj.states.push(out.state);
        traj.averaged_inputs.push(out.averaged_input);
        traj.discrete_outputs.push(out.discrete_output);
        traj.newton_residuals.push(out.newton_residual);
        traj.newton_iterations.push(out.newton_iterations);
    }
    Ok(traj)
}

/// Per-step `|(H(z_{i+1}) − H(z_i))/τ_i + ‖ℓ̄_i + W̄_i ū_i‖² − s(ū_i, ȳ_i)|`.
pub fn discrete_power_balance_residuals<S: QsrSystem + ?Sized>(sys: &S, traj: &Trajectory) -> Vec<f64> {
    let supply = sys.supply();
    (0..traj.grid.steps())
        .map(|i| {
            let z = &traj.states[i];
            let w = &traj.states[i + 1];
            let tau = traj.grid.step_size(i);
            let ubar = &traj.averaged_inputs[i];
            let ybar = &traj.discrete_outputs[i];
            let avg = MidpointAverages::<f64>::new(sys, z, w);
            let diss = norm_sq(&add(
                &avg.dissipation_output,
                &avg.dissipation_feedthrough.mul_vec(ubar),
            ));
            let dh = (sys.energy(w) - sys.energy(z)) / tau;
            (dh + diss - supply.value(ubar, ybar)).abs()
        })
        .collect()
}

/// Time tolerance used when matching coarse nodes to reference nodes.
pub const NODE_MATCH_TOL: f64 = 1e-12;

/// `max_i ‖z_ref(t_i) − z_i‖ / max_i ‖z_ref(t_i)‖` over the nodes of `traj`.
pub fn relative_error(traj: &Trajectory, reference: &Trajectory) -> Result<f64> {
    let mut num = 0.0_f64;
    let mut den = 0.0_f64;
    for (i, &t) in traj.times().iter().enumerate() {
        let j = reference
            .grid
            .find_node(t, NODE_MATCH_TOL)
            .ok_or(Error::GridMismatch { time: t })?;
        let zr = &reference.states[j];
        check_dim(zr.len(), traj.states[i].len())?;
        num = num.max(norm(&sub(zr, &traj.states[i])));
        den = den.max(norm(zr));
    }
    if den == 0.0 {
        return Err(Error::InvalidParameter(
            "reference trajectory vanishes on all nodes".into(),
        ));
    }
    Ok(num / den)
}
