//! Time stepping: the discrete-gradient QSR scheme, the implicit midpoint
//! baseline, the trajectory driver and error metrics.

mod grid;
mod scheme;
mod trajectory;

pub use grid::TimeGrid;
pub use scheme::{
    dg_qsr_step, dg_residual_at_start, gammabar, hbar, midpoint_step, projector, step, DgQsrResidual, InputRule,
    MidpointAverages, MidpointResidual, ProjectorMode, SchemeConfig, SchemeKind, StepOutcome,
};
pub use trajectory::{discrete_power_balance_residuals, integrate, relative_error, Trajectory, NODE_MATCH_TOL};
