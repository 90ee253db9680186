//! Benchmark harness behind the `qsr-dg` binary.

pub mod cli;
pub mod csv;
pub mod experiments;

pub use experiments::{
    convergence_study, power_balance, structural_checks, BalanceReport, ChecksReport, ConvergenceOptions,
    ConvergenceReport,
};
