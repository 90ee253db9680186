use qsr_dg::dgradients::{DiscreteGradientKind, StorageFunction};
use qsr_dg::integrators::{
    dg_qsr_step, discrete_power_balance_residuals, gammabar, hbar, integrate, midpoint_step, projector, relative_error,
    ProjectorMode, SchemeConfig, SchemeKind, TimeGrid, Trajectory,
};
use qsr_dg::model::{supply_value, ControlSignal, QsrSystem, SupplyRate};
use qsr_dg::numerics::{Matrix, Scalar};
use qsr_dg::systems::{reference_settings, ExampleName};
use qsr_dg::Error;

/// `ż = a z` with `H = ½z²`, no input coupling and `ℓ = √(−a) z`.
struct ScalarDecay {
    a: f64,
    supply: SupplyRate,
}

impl ScalarDecay {
    fn new(a: f64) -> Self {
        ScalarDecay {
            a,
            supply: SupplyRate::passivity(1),
        }
    }
}

impl StorageFunction for ScalarDecay {
    fn state_dim(&self) -> usize {
        1
    }
    fn energy<T: Scalar>(&self, z: &[T]) -> T {
        T::cst(0.5) * z[0] * z[0]
    }
    fn energy_gradient<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        vec![z[0]]
    }
}

impl QsrSystem for ScalarDecay {
    fn port_dim(&self) -> usize {
        1
    }
    fn dissipation_dim(&self) -> usize {
        1
    }
    fn supply(&self) -> &SupplyRate {
        &self.supply
    }
    fn drift<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        vec![T::cst(self.a) * z[0]]
    }
    fn input_matrix<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::zeros(1, 1)
    }
    fn output<T: Scalar>(&self, _z: &[T]) -> Vec<T> {
        vec![T::zero()]
    }
    fn feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::zeros(1, 1)
    }
    fn dissipation_output<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        vec![T::cst((-self.a).sqrt()) * z[0]]
    }
    fn dissipation_feedthrough<T: Scalar>(&self, _z: &[T]) -> Matrix<T> {
        Matrix::zeros(1, 1)
    }
}

#[test]
fn projector_algebra() {
    let p = projector(&[1.0, 0.0], ProjectorMode::Onto, 1e-12).unwrap();
    assert_eq!(p.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    let p = projector(&[1.0, 1.0], ProjectorMode::Onto, 1e-12).unwrap();
    for v in p.as_slice() {
        assert!((v - 0.5).abs() < 1e-15);
    }
    let v = [0.3, -1.2, 2.0];
    let a = projector(&v, ProjectorMode::Onto, 1e-12).unwrap();
    let b = projector(&v, ProjectorMode::Orthogonal, 1e-12).unwrap();
    assert!(a.add(&b).sub(&Matrix::identity(3)).max_abs() < 1e-15);
    assert!(a.matmul(&a).sub(&a).max_abs() < 1e-15);
    assert!(b.matmul(&b).sub(&b).max_abs() < 1e-15);
    assert!(a.asymmetry() < 1e-15);
    assert!(matches!(
        projector(&[0.0, 0.0], ProjectorMode::Onto, 1e-12),
        Err(Error::ZeroDirection { .. })
    ));
}

#[test]
fn hbar_and_gammabar_examples() {
    let kind = DiscreteGradientKind::Gonzalez;
    let pend = reference_settings(ExampleName::Pendulum).unwrap().system;
    let z = [0.0, 1.0];
    assert!((hbar(&pend, kind, &z, &z).unwrap()[0] - 1.0).abs() < 1e-14);
    assert!((gammabar(&pend, kind, &z, &z, 1e-12).unwrap() + 0.2).abs() < 1e-14);

    let pi = reference_settings(ExampleName::Pi).unwrap().system;
    assert!((hbar(&pi, kind, &[1.0], &[1.0]).unwrap()[0] - 1.0).abs() < 1e-14);
    assert!((hbar(&pi, kind, &[0.2], &[0.6]).unwrap()[0] - 0.4).abs() < 1e-14);
    assert_eq!(gammabar(&pi, kind, &[0.2], &[0.6], 1e-12).unwrap(), 0.0);

    let synth = reference_settings(ExampleName::Synthetic).unwrap().system;
    let eta = synth.energy_gradient(&[1.0])[0];
    let g = gammabar(&synth, kind, &[1.0], &[1.0], 1e-12).unwrap();
    assert!((g * eta - (-1.0 - eta)).abs() < 1e-13);

    for name in ExampleName::ALL {
        let sys = reference_settings(name).unwrap().system;
        let z = vec![0.7; sys.state_dim()];
        for kind in [
            DiscreteGradientKind::Gonzalez,
            DiscreteGradientKind::ItohAbe,
            DiscreteGradientKind::mean_value(),
        ] {
            let hb = hbar(&sys, kind, &z, &z).unwrap();
            let h = sys.output(&z);
            for k in 0..h.len() {
                assert!((hb[k] - h[k]).abs() < 1e-10, "{name} {kind:?}");
            }
        }
    }
}

#[test]
fn pi_zero_input_is_fixed_point() {
    let pi = reference_settings(ExampleName::Pi).unwrap().system;
    let zero = ControlSignal::zero(1);
    let out = dg_qsr_step(&pi, &SchemeConfig::default(), &[1.0], 0.0, 0.1, &zero).unwrap();
    assert_eq!(out.state, vec![1.0]);
}

#[test]
fn pi_step_is_explicit_in_constant_input() {
    let pi = reference_settings(ExampleName::Pi).unwrap().system;
    let u = ControlSignal::scalar(1, |_| 0.5);
    for cfg in [SchemeConfig::default(), SchemeConfig::midpoint()] {
        let out = qsr_dg::integrators::step(&pi, &cfg, &[1.0], 0.0, 0.1, &u).unwrap();
        assert!((out.state[0] - 1.05).abs() < 1e-14, "{:?}", cfg.scheme);
    }
}

#[test]
fn midpoint_on_scalar_decay() {
    let sys = ScalarDecay::new(-1.0);
    let out = midpoint_step(
        &sys,
        &SchemeConfig::midpoint(),
        &[1.0],
        0.0,
        0.1,
        &ControlSignal::zero(1),
    )
    .unwrap();
    assert!((out.state[0] - 0.95 / 1.05).abs() < 1e-14);
    // For quadratic storage the discrete-gradient step coincides with the midpoint rule.
    let dg = dg_qsr_step(
        &sys,
        &SchemeConfig::default(),
        &[1.0],
        0.0,
        0.1,
        &ControlSignal::zero(1),
    )
    .unwrap();
    assert!((dg.state[0] - 0.95 / 1.05).abs() < 1e-14);
}

#[test]
fn one_step_difference_is_third_order() {
    let setup = reference_settings(ExampleName::Pendulum).unwrap();
    let z0 = &setup.initial_state;
    let diff = |tau: f64| {
        let a = dg_qsr_step(&setup.system, &SchemeConfig::default(), z0, 0.0, tau, &setup.control).unwrap();
        let b = midpoint_step(&setup.system, &SchemeConfig::midpoint(), z0, 0.0, tau, &setup.control).unwrap();
        ((a.state[0] - b.state[0]).powi(2) + (a.state[1] - b.state[1]).powi(2)).sqrt()
    };
    let ratio = diff(0.01) / diff(0.005);
    assert!((ratio - 8.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn discrete_dissipation_inequality() {
    // Energy growth per step never exceeds the supplied power.
    for name in ExampleName::ALL {
        let setup = reference_settings(name).unwrap();
        let grid = TimeGrid::equidistant(5.0, 200).unwrap();
        let traj = integrate(
            &setup.system,
            &SchemeConfig::default(),
            &grid,
            &setup.control,
            &setup.initial_state,
        )
        .unwrap();
        for i in 0..grid.steps() {
            let rate =
                (setup.system.energy(&traj.states[i + 1]) - setup.system.energy(&traj.states[i])) / grid.step_size(i);
            let s = supply_value(
                setup.system.supply(),
                &traj.averaged_inputs[i],
                &traj.discrete_outputs[i],
            )
            .unwrap();
            assert!(rate <= s + 1e-10, "{name} step {i}: {rate} > {s}");
        }
    }
}

#[test]
fn balance_holds_for_every_kind() {
    for name in ExampleName::ALL {
        let setup = reference_settings(name).unwrap();
        let grid = TimeGrid::equidistant(2.0, 100).unwrap();
        for kind in [
            DiscreteGradientKind::Gonzalez,
            DiscreteGradientKind::ItohAbe,
            DiscreteGradientKind::mean_value(),
        ] {
            let cfg = SchemeConfig::default().with_dg_kind(kind);
            let traj = integrate(&setup.system, &cfg, &grid, &setup.control, &setup.initial_state).unwrap();
            let worst = discrete_power_balance_residuals(&setup.system, &traj)
                .into_iter()
                .fold(0.0, f64::max);
            assert!(worst <= 1e-10, "{name} {kind:?}: {worst}");
        }
    }
}

#[test]
fn midpoint_breaks_balance() {
    let setup = reference_settings(ExampleName::Pendulum).unwrap();
    let grid = TimeGrid::equidistant(10.0, 100).unwrap();
    let traj = integrate(
        &setup.system,
        &SchemeConfig::midpoint(),
        &grid,
        &setup.control,
        &setup.initial_state,
    )
    .unwrap();
    assert_eq!(traj.scheme, SchemeKind::ImplicitMidpoint);
    let worst = discrete_power_balance_residuals(&setup.system, &traj)
        .into_iter()
        .fold(0.0, f64::max);
    assert!(worst > 1e-6, "{worst}");
}

fn constant_trajectory(grid: TimeGrid, z: Vec<f64>) -> Trajectory {
    let states = vec![z; grid.points().len()];
    Trajectory {
        scheme: SchemeKind::ImplicitMidpoint,
        grid,
        states,
        averaged_inputs: Vec::new(),
        discrete_outputs: Vec::new(),
        newton_residuals: Vec::new(),
        newton_iterations: Vec::new(),
        unconverged_steps: Vec::new(),
    }
}

#[test]
fn relative_error_cases() {
    let setup = reference_settings(ExampleName::Pendulum).unwrap();
    let fine = TimeGrid::equidistant(1.0, 40).unwrap();
    let coarse = TimeGrid::equidistant(1.0, 10).unwrap();
    let cfg = SchemeConfig::midpoint();
    let reference = integrate(&setup.system, &cfg, &fine, &setup.control, &setup.initial_state).unwrap();
    let mut restricted = constant_trajectory(coarse.clone(), vec![0.0, 0.0]);
    for (i, state) in restricted.states.iter_mut().enumerate() {
        *state = reference.states[4 * i].clone();
    }
    assert_eq!(relative_error(&restricted, &reference).unwrap(), 0.0);

    let r = constant_trajectory(fine.clone(), vec![1.0, 0.0]);
    let t = constant_trajectory(coarse, vec![1.25, 0.0]);
    assert!((relative_error(&t, &r).unwrap() - 0.25).abs() < 1e-15);

    let off = constant_trajectory(TimeGrid::equidistant(1.0, 7).unwrap(), vec![1.0, 0.0]);
    assert!(matches!(relative_error(&off, &r), Err(Error::GridMismatch { .. })));
}

#[test]
fn pendulum_error_ratio_near_four() {
    let setup = reference_settings(ExampleName::Pendulum).unwrap();
    let reference = integrate(
        &setup.system,
        &SchemeConfig::midpoint(),
        &TimeGrid::uniform_step(1.25e-4, 16_000).unwrap(),
        &setup.control,
        &setup.initial_state,
    )
    .unwrap();
    let err = |tau: f64| {
        let grid = TimeGrid::uniform_step(tau, (2.0 / tau).round() as usize).unwrap();
        let traj = integrate(
            &setup.system,
            &SchemeConfig::default(),
            &grid,
            &setup.control,
            &setup.initial_state,
        )
        .unwrap();
        relative_error(&traj, &reference).unwrap()
    };
    let ratio = err(8e-3) / err(4e-3);
    assert!((3.2..=4.9).contains(&ratio), "ratio {ratio}");
}

#[test]
fn zero_gradient_start_aborts() {
    let setup = reference_settings(ExampleName::Pendulum).unwrap();
    let grid = TimeGrid::equidistant(1.0, 10).unwrap();
    let zero = ControlSignal::zero(1);
    let res = integrate(&setup.system, &SchemeConfig::default(), &grid, &zero, &[0.0, 0.0]);
    assert!(matches!(res, Err(Error::StepFailed { index: 0, .. })), "{res:?}");
}
