//! `qsr-dg` command line interface.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use super::csv::{format_vector, table_csv, trajectory_csv, write_file};
use super::experiments::{
    convergence_study, power_balance, structural_checks, ConvergenceOptions, ORDER_BAND, REFERENCE_FRACTION, TAU_MIN,
};
use crate::dgradients::DiscreteGradientKind;
use crate::error::Error;
use crate::integrators::{integrate, SchemeConfig, SchemeKind, TimeGrid};
use crate::model::{ControlSignal, QsrSystem};
use crate::systems::{reference_settings_with_pi_channels, ExampleName, ExampleSetup};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GATE_FAILED: i32 = 1;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_INTEGRATION_FAILED: i32 = 3;
pub const EXIT_GRID_MISMATCH: i32 = 4;

/// Threshold on the Hill–Moylan and power balance residuals for `checks`.
pub const CHECKS_GATE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "qsr-dg",
    version,
    about = "Discrete-gradient integration benchmarks for QSR-dissipative systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one example and write the trajectory.
    Simulate(RunArgs),
    /// Per-step discrete power balance residuals of the discrete-gradient scheme.
    Balance(RunArgs),
    /// Convergence study against a fine implicit-midpoint reference.
    Convergence(RunArgs),
    /// Hill–Moylan and continuous power balance checks at random states.
    Checks(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Dg,
    Midpoint,
}

impl From<SchemeArg> for SchemeKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Dg => SchemeKind::DgQsr,
            SchemeArg::Midpoint => SchemeKind::ImplicitMidpoint,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DgArg {
    Gonzalez,
    ItohAbe,
    MeanValue,
}

impl From<DgArg> for DiscreteGradientKind {
    fn from(d: DgArg) -> Self {
        match d {
            DgArg::Gonzalez => DiscreteGradientKind::Gonzalez,
            DgArg::ItohAbe => DiscreteGradientKind::ItohAbe,
            DgArg::MeanValue => DiscreteGradientKind::mean_value(),
        }
    }
}

fn parse_example(s: &str) -> Result<ExampleName, String> {
    s.parse::<ExampleName>().map_err(|e| e.to_string())
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// pendulum | lti-ocp | pi | synthetic
    #[arg(long, value_parser = parse_example)]
    pub example: ExampleName,

    #[arg(long, value_enum, default_value = "dg")]
    pub scheme: SchemeArg,

    /// Number of time steps.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub q: u64,

    /// Time horizon in seconds.
    #[arg(long = "T", default_value_t = 10.0, value_parser = parse_positive)]
    pub horizon: f64,

    #[arg(long, value_enum, default_value = "gonzalez")]
    pub dg: DgArg,

    /// Output CSV path; a JSON sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Seed for random sampling.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Coarsest convergence step is 2^s_max · 1e-3.
    #[arg(long = "s-max", default_value_t = 5, value_parser = clap::value_parser!(u32).range(2..=12))]
    pub s_max: u32,

    /// Exit threshold for the maximum balance residual.
    #[arg(long, default_value_t = 1e-8, value_parser = parse_positive)]
    pub gate: f64,

    /// Replace the example control by u ≡ 0.
    #[arg(long)]
    pub zero_input: bool,

    /// Number of independent PI channels (pi example only).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=8))]
    pub pi_channels: u64,

    /// Directory for cached reference trajectories.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

impl RunArgs {
    fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig {
            scheme: self.scheme.into(),
            dg_kind: self.dg.into(),
            ..SchemeConfig::default()
        }
    }

    fn setup(&self) -> Result<ExampleSetup, Error> {
        let mut setup = reference_settings_with_pi_channels(self.example, self.pi_channels as usize)?;
        if self.zero_input {
            setup.control = ControlSignal::zero(setup.system.port_dim());
        }
        Ok(setup)
    }

    fn out_path(&self, command: &str) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}_{command}.csv", self.example)))
    }

    fn metadata(&self, command: &str) -> serde_json::Value {
        json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "example": self.example.as_str(),
            "scheme": SchemeKind::from(self.scheme).name(),
            "dg": DiscreteGradientKind::from(self.dg).name(),
            "q": self.q,
            "T": self.horizon,
            "seed": self.seed,
            "s_max": self.s_max,
            "gate": self.gate,
            "zero_input": self.zero_input,
            "pi_channels": self.pi_channels,
            "newton": {
                "max_iterations": self.scheme_config().newton.max_iterations,
                "residual_tolerance": self.scheme_config().newton.residual_tolerance,
            },
        })
    }
}

/// Sidecar path: the CSV path with a `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn write_outputs(csv_path: &Path, csv: &str, meta: serde_json::Value) -> Result<(), i32> {
    let sidecar = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    write_file(csv_path, csv)
        .and_then(|_| write_file(&sidecar_path(csv_path), &(sidecar + "\n")))
        .map_err(|e| {
            eprintln!("error: cannot write {}: {e}", csv_path.display());
            EXIT_BAD_ARGS
        })
}

fn exit_for(err: &Error) -> i32 {
    match err {
        Error::GridMismatch { .. } => EXIT_GRID_MISMATCH,
        Error::StepFailed { source, .. } if matches!(**source, Error::GridMismatch { .. }) => EXIT_GRID_MISMATCH,
        Error::UnknownExample(_) | Error::InvalidParameter(_) | Error::InvalidGrid(_) => EXIT_BAD_ARGS,
        _ => EXIT_INTEGRATION_FAILED,
    }
}

fn fail(err: Error) -> i32 {
    eprintln!("error: {err}");
    exit_for(&err)
}

pub fn cmd_simulate(args: &RunArgs) -> i32 {
    let setup = match args.setup() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let cfg = args.scheme_config();
    let grid = match TimeGrid::equidistant(args.horizon, args.q as usize) {
        Ok(g) => g,
        Err(e) => return fail(e),
    };
    let traj = match integrate(&setup.system, &cfg, &grid, &setup.control, &setup.initial_state) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let out = args.out_path("simulate");
    let mut meta = args.metadata("simulate");
    meta["max_newton_residual"] = json!(traj.max_newton_residual());
    meta["unconverged_steps"] = json!(traj.unconverged_steps.len());
    if let Err(code) = write_outputs(&out, &trajectory_csv(&traj), meta) {
        return code;
    }
    println!(
        "example: {}  scheme: {}  q: {}  T: {}",
        args.example,
        cfg.scheme.name(),
        args.q,
        args.horizon
    );
    println!("final state: {}", format_vector(traj.final_state()));
    println!("max newton residual: {:.3e}", traj.max_newton_residual());
    if !traj.unconverged_steps.is_empty() {
        println!("steps above Newton tolerance: {}", traj.unconverged_steps.len());
    }
    println!("wrote {}", out.display());
    EXIT_OK
}

pub fn cmd_balance(args: &RunArgs) -> i32 {
    let setup = match args.setup() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let cfg = SchemeConfig {
        scheme: SchemeKind::DgQsr,
        ..args.scheme_config()
    };
    let grid = match TimeGrid::equidistant(args.horizon, args.q as usize) {
        Ok(g) => g,
        Err(e) => return fail(e),
    };
    let report = match power_balance(args.example, &setup, &cfg, &grid) {
        Ok((_, r)) => r,
        Err(e) => return fail(e),
    };
    let out = args.out_path("balance");
    let csv = table_csv(
        &["t", "balance_residual"],
        report.residuals.iter().map(|&(t, r)| vec![Some(t), Some(r)]),
    );
    let mut meta = args.metadata("balance");
    meta["max_residual"] = json!(report.max_residual);
    meta["max_newton_residual"] = json!(report.max_newton_residual);
    if let Err(code) = write_outputs(&out, &csv, meta) {
        return code;
    }
    println!(
        "example: {}  dg: {}  q: {}  T: {}",
        args.example, report.dg_kind, args.q, args.horizon
    );
    println!("max balance residual: {:.3e}", report.max_residual);
    println!("max newton residual: {:.3e}", report.max_newton_residual);
    println!("wrote {}", out.display());
    if report.max_residual <= args.gate {
        EXIT_OK
    } else {
        eprintln!(
            "balance residual {:.3e} exceeds gate {:.3e}",
            report.max_residual, args.gate
        );
        EXIT_GATE_FAILED
    }
}

pub fn cmd_convergence(args: &RunArgs) -> i32 {
    let setup = match args.setup() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let opts = ConvergenceOptions {
        s_max: args.s_max,
        horizon: args.horizon,
        cfg: args.scheme_config(),
        cache_dir: args.cache_dir.clone(),
        cache_tag: if args.pi_channels > 1 {
            format!("-ch{}", args.pi_channels)
        } else {
            String::new()
        },
    };
    let report = match convergence_study(args.example, &setup, &opts) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let out = args.out_path("convergence");
    let mut meta = args.metadata("convergence");
    meta["tau_min"] = json!(TAU_MIN);
    meta["reference_step"] = json!(TAU_MIN * REFERENCE_FRACTION);
    meta["effective_horizon"] = json!(report.horizon);
    meta["median_order_finest"] = json!(report.finest_median_order());
    if let Err(code) = write_outputs(&out, &report.csv(), meta) {
        return code;
    }
    println!(
        "example: {}  scheme: {}  horizon: {}  reference step: {:e}",
        args.example, report.scheme, report.horizon, report.reference_step
    );
    for (k, &(tau, e)) in report.errors.iter().enumerate() {
        match k.checked_sub(1).map(|j| report.observed_orders[j]) {
            Some(o) => println!("tau {tau:.4e}  rel_error {e:.4e}  order {o:.3}"),
            None => println!("tau {tau:.4e}  rel_error {e:.4e}"),
        }
    }
    let median = report.finest_median_order();
    println!("median order (three finest pairs): {median:.3}");
    println!("wrote {}", out.display());
    if report.order_within_band() {
        EXIT_OK
    } else {
        eprintln!("median order {median:.3} outside [{}, {}]", ORDER_BAND.0, ORDER_BAND.1);
        EXIT_GATE_FAILED
    }
}

pub fn cmd_checks(args: &RunArgs) -> i32 {
    let setup = match args.setup() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let report = match structural_checks(args.example, &setup.system, 100, args.seed) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let [r1, r2, r3] = report.max_hill_moylan;
    println!(
        "example: {}  samples: {}  seed: {}",
        args.example, report.samples, report.seed
    );
    println!("max Hill-Moylan residuals: r1={r1:.3e} r2={r2:.3e} r3={r3:.3e}");
    println!(
        "max continuous power balance residual: {:.3e}",
        report.max_power_balance
    );
    println!("min |det(QD+S)|: {:.3e}", report.min_port_determinant);
    if let Some(out) = &args.out {
        let mut meta = args.metadata("checks");
        meta["report"] = serde_json::to_value(&report).expect("report serializes");
        let csv = table_csv(
            &["r1", "r2", "r3", "power_balance"],
            std::iter::once(vec![Some(r1), Some(r2), Some(r3), Some(report.max_power_balance)]),
        );
        if let Err(code) = write_outputs(out, &csv, meta) {
            return code;
        }
    }
    if report.max_residual() <= CHECKS_GATE {
        EXIT_OK
    } else {
        EXIT_GATE_FAILED
    }
}

/// Parse-free entry point used by the binary.
pub fn run(cli: &Cli) -> i32 {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Balance(a) => cmd_balance(a),
        Command::Convergence(a) => cmd_convergence(a),
        Command::Checks(a) => cmd_checks(a),
    }
}
