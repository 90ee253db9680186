//! The benchmark experiments as library calls: power balance, convergence
//! against a fine implicit-midpoint reference, and Hill–Moylan checks.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::csv::{parse_csv, table_csv, write_file};
use crate::dgradients::DiscreteGradientKind;
use crate::error::{Error, Result};
use crate::integrators::{
    discrete_power_balance_residuals, integrate, relative_error, SchemeConfig, SchemeKind, TimeGrid, Trajectory,
};
use crate::model::{
    continuous_power_balance_residual, hill_moylan_residual, port_matrix_determinant, HillMoylanResidual, QsrSystem,
};
use crate::systems::{ExampleName, ExampleSetup};

/// Smallest step of the convergence study.
pub const TAU_MIN: f64 = 1e-3;
/// Reference step as a fraction of [`TAU_MIN`].
pub const REFERENCE_FRACTION: f64 = 0.125;
/// Acceptable band for the observed convergence order.
pub const ORDER_BAND: (f64, f64) = (1.7, 2.3);

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub example: String,
    pub dg_kind: String,
    /// `(t_i, residual_i)` for every step.
    pub residuals: Vec<(f64, f64)>,
    pub max_residual: f64,
    pub max_newton_residual: f64,
}

/// Run the discrete-gradient scheme and evaluate the per-step power balance.
pub fn power_balance(
    name: ExampleName,
    setup: &ExampleSetup,
    cfg: &SchemeConfig,
    grid: &TimeGrid,
) -> Result<(Trajectory, BalanceReport)> {
    let traj = integrate(&setup.system, cfg, grid, &setup.control, &setup.initial_state)?;
    let residuals = discrete_power_balance_residuals(&setup.system, &traj);
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let report = BalanceReport {
        example: name.to_string(),
        dg_kind: cfg.dg_kind.name().to_string(),
        residuals: traj.times().iter().copied().zip(residuals).collect(),
        max_residual,
        max_newton_residual: traj.max_newton_residual(),
    };
    Ok((traj, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub example: String,
    pub scheme: String,
    pub horizon: f64,
    pub reference_step: f64,
    /// `(τ, relative error)`, τ strictly decreasing.
    pub errors: Vec<(f64, f64)>,
    /// `log₂(e(2τ)/e(τ))` for consecutive entries of `errors`.
    pub observed_orders: Vec<f64>,
}

impl ConvergenceReport {
    /// Median observed order over the three finest step pairs (fewer if not available).
    pub fn finest_median_order(&self) -> f64 {
        let k = self.observed_orders.len().min(3);
        let mut tail: Vec<f64> = self.observed_orders[self.observed_orders.len() - k..].to_vec();
        if tail.is_empty() {
            return f64::NAN;
        }
        tail.sort_by(f64::total_cmp);
        let mid = tail.len() / 2;
        if tail.len() % 2 == 1 {
            tail[mid]
        } else {
            0.5 * (tail[mid - 1] + tail[mid])
        }
    }

    pub fn order_within_band(&self) -> bool {
        let m = self.finest_median_order();
        m >= ORDER_BAND.0 && m <= ORDER_BAND.1
    }

    pub fn csv(&self) -> String {
        let rows = self.errors.iter().enumerate().map(|(k, &(tau, e))| {
            // The order column pairs each τ with the next coarser step.
            let order = k.checked_sub(1).map(|j| self.observed_orders[j]);
            vec![Some(tau), Some(e), order]
        });
        table_csv(&["tau", "rel_error", "observed_order"], rows)
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceOptions {
    pub s_max: u32,
    /// Requested horizon; truncated to a multiple of the coarsest step.
    pub horizon: f64,
    pub cfg: SchemeConfig,
    pub cache_dir: Option<PathBuf>,
    /// Extra key component for cached references (e.g. PI channel count).
    pub cache_tag: String,
}

/// Number of coarse steps and effective horizon shared by all grids.
pub fn convergence_horizon(horizon: f64, s_max: u32) -> Result<(usize, f64)> {
    let coarse = TAU_MIN * f64::from(1u32 << s_max);
    let q = (horizon / coarse + 1e-9).floor() as usize;
    if q == 0 {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is shorter than the coarsest step {coarse}"
        )));
    }
    Ok((q, q as f64 * coarse))
}

fn reference_cache_path(dir: &Path, name: ExampleName, tag: &str, horizon: f64, step: f64) -> PathBuf {
    dir.join(format!("ref_{name}{tag}_T{horizon:.6e}_h{step:.6e}.csv"))
}

fn load_reference(path: &Path, grid: &TimeGrid, scheme: SchemeKind) -> Option<Trajectory> {
    let text = std::fs::read_to_string(path).ok()?;
    let table = parse_csv(&text).ok()?;
    if table.rows.len() != grid.points().len() {
        return None;
    }
    let states: Option<Vec<Vec<f64>>> = table.rows.iter().map(|r| r[1..].iter().copied().collect()).collect();
    let states = states?;
    Some(Trajectory {
        scheme,
        grid: grid.clone(),
        states,
        averaged_inputs: Vec::new(),
        discrete_outputs: Vec::new(),
        newton_residuals: Vec::new(),
        newton_iterations: Vec::new(),
        unconverged_steps: Vec::new(),
    })
}

fn store_reference(path: &Path, traj: &Trajectory) -> std::io::Result<()> {
    let n = traj.states[0].len();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|k| format!("z{k}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = traj.times().iter().zip(&traj.states).map(|(&t, z)| {
        std::iter::once(Some(t))
            .chain(z.iter().map(|&v| Some(v)))
            .collect::<Vec<_>>()
    });
    write_file(path, &table_csv(&header_refs, rows))
}

/// Implicit midpoint reference at `REFERENCE_FRACTION · TAU_MIN`, loaded from
/// or stored into `cache_dir` when given.
pub fn reference_trajectory(
    name: ExampleName,
    setup: &ExampleSetup,
    horizon_steps: usize,
    s_max: u32,
    opts: &ConvergenceOptions,
) -> Result<Trajectory> {
    let step = TAU_MIN * REFERENCE_FRACTION;
    let q = horizon_steps * (1usize << s_max) * 8;
    let grid = TimeGrid::uniform_step(step, q)?;
    let cache = opts
        .cache_dir
        .as_ref()
        .map(|dir| reference_cache_path(dir, name, &opts.cache_tag, grid.horizon(), step));
    if let Some(traj) = cache
        .as_ref()
        .and_then(|p| load_reference(p, &grid, SchemeKind::ImplicitMidpoint))
    {
        return Ok(traj);
    }
    let cfg = SchemeConfig {
        newton: opts.cfg.newton,
        ..SchemeConfig::midpoint()
    };
    let traj = integrate(&setup.system, &cfg, &grid, &setup.control, &setup.initial_state)?;
    if let Some(p) = cache {
        // A failed cache write only costs a recomputation next time.
        let _ = store_reference(&p, &traj);
    }
    Ok(traj)
}

/// Relative nodal errors for `τ = 2^s·TAU_MIN`, `s = s_max … 0`.
pub fn convergence_study(
    name: ExampleName,
    setup: &ExampleSetup,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport> {
    if opts.s_max < 2 || opts.s_max > 12 {
        return Err(Error::InvalidParameter(format!(
            "s_max must be in 2..=12, got {}",
            opts.s_max
        )));
    }
    let (coarse_steps, horizon) = convergence_horizon(opts.horizon, opts.s_max)?;
    let reference = reference_trajectory(name, setup, coarse_steps, opts.s_max, opts)?;

    let mut errors: Vec<(f64, f64)> = (0..=opts.s_max)
        .into_par_iter()
        .map(|s| {
            let tau = TAU_MIN * f64::from(1u32 << s);
            let q = coarse_steps << (opts.s_max - s);
            let grid = TimeGrid::uniform_step(tau, q)?;
            let traj = integrate(&setup.system, &opts.cfg, &grid, &setup.control, &setup.initial_state)?;
            Ok((tau, relative_error(&traj, &reference)?))
        })
        .collect::<Result<Vec<_>>>()?;
    errors.sort_by(|a, b| b.0.total_cmp(&a.0));
    let observed_orders = errors.windows(2).map(|w| (w[0].1 / w[1].1).log2()).collect();
    Ok(ConvergenceReport {
        example: name.to_string(),
        scheme: opts.cfg.scheme.name().to_string(),
        horizon,
        reference_step: TAU_MIN * REFERENCE_FRACTION,
        errors,
        observed_orders,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChecksReport {
    pub example: String,
    pub samples: usize,
    pub seed: u64,
    pub max_hill_moylan: [f64; 3],
    pub max_power_balance: f64,
    pub min_port_determinant: f64,
}

impl ChecksReport {
    pub fn max_residual(&self) -> f64 {
        self.max_hill_moylan
            .iter()
            .copied()
            .fold(self.max_power_balance, f64::max)
    }
}

/// Sample states in `[−2, 2]ⁿ` and inputs in `[−2, 2]ᵐ` and record the
/// worst Hill–Moylan and continuous power balance residuals.
pub fn structural_checks<S: QsrSystem>(name: ExampleName, sys: &S, samples: usize, seed: u64) -> Result<ChecksReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.state_dim();
    let m = sys.port_dim();
    let mut worst = HillMoylanResidual::default();
    let mut balance = 0.0_f64;
    let mut min_det = f64::INFINITY;
    for _ in 0..samples {
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        worst = worst.componentwise_max(hill_moylan_residual(sys, &z)?);
        balance = balance.max(continuous_power_balance_residual(sys, &z, &u)?);
        min_det = min_det.min(port_matrix_determinant(sys, &z)?.abs());
    }
    Ok(ChecksReport {
        example: name.to_string(),
        samples,
        seed,
        max_hill_moylan: [worst.energy, worst.port, worst.feedthrough],
        max_power_balance: balance,
        min_port_determinant: min_det,
    })
}

/// Convenience for callers holding only the discrete gradient choice.
pub fn dg_config(kind: DiscreteGradientKind) -> SchemeConfig {
    SchemeConfig::default().with_dg_kind(kind)
}
