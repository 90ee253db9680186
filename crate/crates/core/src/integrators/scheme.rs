//! One-step maps: the discrete-gradient QSR scheme and the implicit midpoint rule.
//!
//! The discrete-gradient step solves, for `w = z_{i+1}`,
//!
//! ```text
//! (w − z_i)/τ = γ̄(z_i,w)·∇̄H(z_i,w) + P⊥_{∇̄H(z_i,w)} f̄(z_i,w) + B̄(z_i,w)·ū_i
//! h̄(z,w)     = (Q D̄ + S)⁻ᵀ (½ B̄ᵀ ∇̄H + W̄ᵀ ℓ̄)
//! γ̄(z,w)     = (h̄ᵀ Q h̄ − ‖ℓ̄‖²) / ‖∇̄H‖²
//! ```
//!
//! All two-point averages of `f`, `B`, `D`, `ℓ`, `W` are midpoint evaluations.

use crate::dgradients::{discrete_gradient, DiscreteGradientKind};
use crate::error::{Error, Result};
use crate::model::{ControlSignal, QsrSystem};
use crate::numerics::linalg::{add, check_dim, dot, lift, midpoint, norm, norm_sq, solve_dense, value_norm, values};
use crate::numerics::{newton_solve, Matrix, NewtonSettings, Scalar, VectorMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SchemeKind {
    #[default]
    DgQsr,
    ImplicitMidpoint,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::DgQsr => "dg",
            SchemeKind::ImplicitMidpoint => "midpoint",
        }
    }
}

/// How `ū(t_i, τ_i)` is formed from the control signal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InputRule {
    /// `(u(t_i) + u(t_i + τ_i)) / 2`
    #[default]
    Trapezoidal,
    /// `u(t_i + τ_i/2)`
    MidpointSample,
}

impl InputRule {
    pub fn average(&self, u: &ControlSignal, t: f64, tau: f64) -> Vec<f64> {
        match self {
            InputRule::Trapezoidal => midpoint(&u.eval(t), &u.eval(t + tau)),
            InputRule::MidpointSample => u.eval(t + 0.5 * tau),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub scheme: SchemeKind,
    pub dg_kind: DiscreteGradientKind,
    pub newton: NewtonSettings,
    /// Relative floor `c`: a step aborts when `‖∇̄H‖ ≤ c·(1 + ‖∇H(z_i)‖)`.
    pub gradient_floor: f64,
    pub input_rule: InputRule,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            scheme: SchemeKind::DgQsr,
            dg_kind: DiscreteGradientKind::Gonzalez,
            newton: NewtonSettings::default(),
            gradient_floor: 1e-12,
            input_rule: InputRule::Trapezoidal,
        }
    }
}

impl SchemeConfig {
    pub fn midpoint() -> Self {
        SchemeConfig {
            scheme: SchemeKind::ImplicitMidpoint,
            ..SchemeConfig::default()
        }
    }

    pub fn with_dg_kind(mut self, kind: DiscreteGradientKind) -> Self {
        self.dg_kind = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.gradient_floor.is_nan() || self.gradient_floor < 0.0 {
            return Err(Error::InvalidParameter("gradient_floor must be nonnegative".into()));
        }
        self.newton.validate()?;
        self.dg_kind.validate()
    }

    /// Absolute floor at a state whose gradient norm is `eta_norm`.
    pub fn floor_at(&self, eta_norm: f64) -> f64 {
        self.gradient_floor * (1.0 + eta_norm)
    }
}

/// Midpoint averages `φ̄(z, w) = φ((z + w)/2)` of the system maps.
#[derive(Clone, Debug)]
pub struct MidpointAverages<T: Scalar> {
    pub drift: Vec<T>,
    pub input_matrix: Matrix<T>,
    pub feedthrough: Matrix<T>,
    pub dissipation_output: Vec<T>,
    pub dissipation_feedthrough: Matrix<T>,
}

impl<T: Scalar> MidpointAverages<T> {
    pub fn new<S: QsrSystem + ?Sized>(sys: &S, z: &[T], w: &[T]) -> Self {
        let m = midpoint(z, w);
        MidpointAverages {
            drift: sys.drift(&m),
            input_matrix: sys.input_matrix(&m),
            feedthrough: sys.feedthrough(&m),
            dissipation_output: sys.dissipation_output(&m),
            dissipation_feedthrough: sys.dissipation_feedthrough(&m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectorMode {
    /// `P_v = v vᵀ / ‖v‖²`
    Onto,
    /// `I − P_v`
    Orthogonal,
}

pub fn projector(v: &[f64], mode: ProjectorMode, floor: f64) -> Result<Matrix> {
    let nv = norm(v);
    if nv <= floor || nv == 0.0 {
        return Err(Error::ZeroDirection { norm: nv, floor });
    }
    let n = v.len();
    let inv = 1.0 / (nv * nv);
    let onto = Matrix::from_fn(n, n, |i, j| v[i] * v[j] * inv);
    Ok(match mode {
        ProjectorMode::Onto => onto,
        ProjectorMode::Orthogonal => Matrix::identity(n).sub(&onto),
    })
}

/// `∇̄H`, the midpoint averages and `h̄` at one pair `(z, w)`.
struct TwoPointTerms<T: Scalar> {
    dgrad: Vec<T>,
    avg: MidpointAverages<T>,
    hbar: Vec<T>,
}

fn two_point_terms<S, T>(sys: &S, kind: DiscreteGradientKind, z: &[T], w: &[T]) -> Result<TwoPointTerms<T>>
where
    S: QsrSystem + ?Sized,
    T: Scalar,
{
    let dgrad = discrete_gradient(kind, sys, z, w)?;
    let avg = MidpointAverages::new(sys, z, w);
    let hbar = hbar_from(sys, &dgrad, &avg)?;
    Ok(TwoPointTerms { dgrad, avg, hbar })
}

fn hbar_from<S, T>(sys: &S, dgrad: &[T], avg: &MidpointAverages<T>) -> Result<Vec<T>>
where
    S: QsrSystem + ?Sized,
    T: Scalar,
{
    let supply = sys.supply();
    let q = supply.q().lift::<T>();
    let s = supply.s().lift::<T>();
    let port = q.matmul(&avg.feedthrough).add(&s);
    let half = T::cst(0.5);
    let rhs = add(
        &avg.input_matrix
            .tr_mul_vec(dgrad)
            .into_iter()
            .map(|v| half * v)
            .collect::<Vec<_>>(),
        &avg.dissipation_feedthrough.tr_mul_vec(&avg.dissipation_output),
    );
    solve_dense(&port.transpose(), &rhs)
}

fn gammabar_from<S, T>(sys: &S, terms: &TwoPointTerms<T>, floor: f64) -> Result<T>
where
    S: QsrSystem + ?Sized,
    T: Scalar,
{
    let gnorm = value_norm(&terms.dgrad);
    if gnorm <= floor || gnorm == 0.0 {
        return Err(Error::ZeroDirection { norm: gnorm, floor });
    }
    let q = sys.supply().q().lift::<T>();
    let h = &terms.hbar;
    Ok((dot(h, &q.mul_vec(h)) - norm_sq(&terms.avg.dissipation_output)) / norm_sq(&terms.dgrad))
}

/// `h̄(z, w)`.
pub fn hbar<S, T>(sys: &S, kind: DiscreteGradientKind, z: &[T], w: &[T]) -> Result<Vec<T>>
where
    S: QsrSystem + ?Sized,
    T: Scalar,
{
    two_point_terms(sys, kind, z, w).map(|t| t.hbar)
}

/// `γ̄(z, w)`; fails with [`Error::ZeroDirection`] if `‖∇̄H(z, w)‖ ≤ floor`.
pub fn gammabar<S, T>(sys: &S, kind: DiscreteGradientKind, z: &[T], w: &[T], floor: f64) -> Result<T>
where
    S: QsrSystem + ?Sized,
    T: Scalar,
{
    let terms = two_point_terms(sys, kind, z, w)?;
    gammabar_from(sys, &terms, floor)
}

/// Residual `F(w) = w − z_i − τ·[γ̄∇̄H + P⊥f̄ + B̄ū]` of the discrete-gradient step.
pub struct DgQsrResidual<'a, S: ?Sized> {
    pub sys: &'a S,
    pub kind: DiscreteGradientKind,
    pub start: &'a [f64],
    pub tau: f64,
    pub averaged_input: &'a [f64],
    /// Absolute floor on `‖∇̄H‖`.
    pub floor: f64,
}

impl<S: QsrSystem + ?Sized> VectorMap for DgQsrResidual<'_, S> {
    fn input_dim(&self) -> usize {
        self.start.len()
    }

    fn output_dim(&self) -> usize {
        self.start.len()
    }

    fn eval<T: Scalar>(&self, w: &[T]) -> Result<Vec<T>> {
        let z: Vec<T> = lift(self.start);
        let u: Vec<T> = lift(self.averaged_input);
        let terms = two_point_terms(self.sys, self.kind, &z, w)?;
        let gamma = gammabar_from(self.sys, &terms, self.floor)?;
        let g = &terms.dgrad;
        // γ̄ g + (I − g gᵀ/‖g‖²) f̄ = f̄ + (γ̄ − gᵀf̄/‖g‖²) g
        let coeff = gamma - dot(g, &terms.avg.drift) / norm_sq(g);
        let bu = terms.avg.input_matrix.mul_vec(&u);
        let tau = T::cst(self.tau);
        Ok((0..w.len())
            .map(|k| w[k] - z[k] - tau * (terms.avg.drift[k] + coeff * g[k] + bu[k]))
            .collect())
    }
}

/// Residual `F(w) = w − z_i − τ·[f̄ + B̄ū]` of the implicit midpoint rule.
pub struct MidpointResidual<'a, S: ?Sized> {
    pub sys: &'a S,
    pub start: &'a [f64],
    pub tau: f64,
    pub averaged_input: &'a [f64],
}

impl<S: QsrSystem + ?Sized> VectorMap for MidpointResidual<'_, S> {
    fn input_dim(&self) -> usize {
        self.start.len()
    }

    fn output_dim(&self) -> usize {
        self.start.len()
    }

    fn eval<T: Scalar>(&self, w: &[T]) -> Result<Vec<T>> {
        let z: Vec<T> = lift(self.start);
        let u: Vec<T> = lift(self.averaged_input);
        let m = midpoint(&z, w);
        let f = self.sys.drift(&m);
        let bu = self.sys.input_matrix(&m).mul_vec(&u);
        let tau = T::cst(self.tau);
        Ok((0..w.len()).map(|k| w[k] - z[k] - tau * (f[k] + bu[k])).collect())
    }
}

/// Result of a single step `z_i → z_{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub state: Vec<f64>,
    /// `ū_i`
    pub averaged_input: Vec<f64>,
    /// `ȳ_i`
    pub discrete_output: Vec<f64>,
    pub newton_residual: f64,
    pub newton_iterations: usize,
    /// `false` when Newton hit its iteration cap above tolerance.
    pub converged: bool,
}

impl StepOutcome {
    /// [`Error::NewtonDidNotConverge`] if the step was flagged.
    pub fn ensure_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NewtonDidNotConverge {
                iterations: self.newton_iterations,
                residual: self.newton_residual,
            })
        }
    }
}

fn check_step_inputs<S: QsrSystem + ?Sized>(sys: &S, z: &[f64], u: &ControlSignal, tau: f64) -> Result<()> {
    check_dim(sys.state_dim(), z.len())?;
    check_dim(sys.port_dim(), u.dim())?;
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step size must be positive, got {tau}"
        )));
    }
    Ok(())
}

/// Newton initial guess for the next state.
fn initial_guess(start: &[f64]) -> Vec<f64> {
    start.to_vec()
}

/// One step of the discrete-gradient QSR scheme.
pub fn dg_qsr_step<S: QsrSystem + ?Sized>(
    sys: &S,
    cfg: &SchemeConfig,
    z: &[f64],
    t: f64,
    tau: f64,
    u: &ControlSignal,
) -> Result<StepOutcome> {
    cfg.validate()?;
    check_step_inputs(sys, z, u, tau)?;
    let ubar = cfg.input_rule.average(u, t, tau);
    let floor = cfg.floor_at(norm(&sys.energy_gradient(z)));
    let map = DgQsrResidual {
        sys,
        kind: cfg.dg_kind,
        start: z,
        tau,
        averaged_input: &ubar,
        floor,
    };
    let out = newton_solve(&map, &initial_guess(z), &cfg.newton)?;
    let next = out.solution;
    let hbar_next = hbar(sys, cfg.dg_kind, z, &next)?;
    let avg = MidpointAverages::new(sys, z, &next);
    let ybar = add(&hbar_next, &avg.feedthrough.mul_vec(&ubar));
    Ok(StepOutcome {
        state: next,
        averaged_input: ubar,
        discrete_output: ybar,
        newton_residual: out.residual,
        newton_iterations: out.iterations,
        converged: out.converged,
    })
}

/// One step of the implicit midpoint rule. The recorded output is
/// `h(m) + D(m)ū` at the midpoint `m`.
pub fn midpoint_step<S: QsrSystem + ?Sized>(
    sys: &S,
    cfg: &SchemeConfig,
    z: &[f64],
    t: f64,
    tau: f64,
    u: &ControlSignal,
) -> Result<StepOutcome> {
    cfg.newton.validate()?;
    check_step_inputs(sys, z, u, tau)?;
    let ubar = cfg.input_rule.average(u, t, tau);
    let map = MidpointResidual {
        sys,
        start: z,
        tau,
        averaged_input: &ubar,
    };
    let out = newton_solve(&map, &initial_guess(z), &cfg.newton)?;
    let next = out.solution;
    let m = midpoint(z, &next);
    let ybar = add(&sys.output(&m), &sys.feedthrough(&m).mul_vec(&ubar));
    Ok(StepOutcome {
        state: next,
        averaged_input: ubar,
        discrete_output: ybar,
        newton_residual: out.residual,
        newton_iterations: out.iterations,
        converged: out.converged,
    })
}

/// Dispatch on `cfg.scheme`.
pub fn step<S: QsrSystem + ?Sized>(
    sys: &S,
    cfg: &SchemeConfig,
    z: &[f64],
    t: f64,
    tau: f64,
    u: &ControlSignal,
) -> Result<StepOutcome> {
    match cfg.scheme {
        SchemeKind::DgQsr => dg_qsr_step(sys, cfg, z, t, tau, u),
        SchemeKind::ImplicitMidpoint => midpoint_step(sys, cfg, z, t, tau, u),
    }
}

/// `F(z_i)` of the discrete-gradient step map, i.e. the residual evaluated at `w = z_i`.
pub fn dg_residual_at_start<S: QsrSystem + ?Sized>(
    sys: &S,
    cfg: &SchemeConfig,
    z: &[f64],
    tau: f64,
    averaged_input: &[f64],
) -> Result<Vec<f64>> {
    let floor = cfg.floor_at(norm(&sys.energy_gradient(z)));
    let map = DgQsrResidual {
        sys,
        kind: cfg.dg_kind,
        start: z,
        tau,
        averaged_input,
        floor,
    };
    map.eval(z).map(|v: Vec<f64>| values(&v))
}
