use qsr_dg::dgradients::StorageFunction;
use qsr_dg::model::{
    continuous_power_balance_residual, dissipation_rate, hill_moylan_residual, supply_value, QsrSystem, SupplyRate,
};
use qsr_dg::numerics::Matrix;
use qsr_dg::systems::riccati::is_hurwitz;
use qsr_dg::systems::{
    are_residual, lti_ocp_benchmark_params, make_lti_ocp, make_pendulum, make_pi, make_synthetic, reference_settings,
    reference_settings_by_name, solve_are, solve_are_from_gain, ExampleName, ExampleSystem, PendulumParams, PiParams,
    SyntheticParams,
};
use qsr_dg::Error;

#[test]
fn supply_rate_values() {
    let pass = SupplyRate::passivity(1);
    assert_eq!(supply_value(&pass, &[2.0], &[3.0]).unwrap(), 6.0);
    let pend = SupplyRate::scalar(-0.2, 0.5, 0.0);
    assert!((supply_value(&pend, &[1.0], &[2.0]).unwrap() - 1.2).abs() < 1e-15);
    let synth = SupplyRate::scalar(-1.0, 0.0, 1.0);
    assert_eq!(supply_value(&synth, &[1.0], &[1.0]).unwrap(), 0.0);
}

#[test]
fn dissipation_rate_values() {
    let pend = reference_settings(ExampleName::Pendulum).unwrap().system;
    assert_eq!(dissipation_rate(&pend, &[0.3, 1.0], &[2.0]).unwrap(), 0.0);
    let synth = make_synthetic(SyntheticParams {
        alpha: 2.0,
        lambda: 1.0,
    })
    .unwrap();
    assert!((dissipation_rate(&synth, &[1.0], &[0.0]).unwrap() - 1.0).abs() < 1e-15);
    let lti = reference_settings(ExampleName::LtiOcp).unwrap().system;
    assert!((dissipation_rate(&lti, &[1.0, 1.0], &[0.0]).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn pendulum_facts() {
    let p = make_pendulum(PendulumParams { g: 9.81, lambda: 0.2 }).unwrap();
    assert!((p.energy(&[std::f64::consts::PI, 0.0]) - 19.62).abs() < 1e-12);
    assert_eq!(p.energy_gradient(&[0.0, 0.0]), vec![0.0, 0.0]);
    let r = hill_moylan_residual(&p, &[std::f64::consts::FRAC_PI_4, -1.0]).unwrap();
    assert!(r.max() <= 1e-12, "{r}");
    let b = continuous_power_balance_residual(&p, &[std::f64::consts::FRAC_PI_4, -1.0], &[0.5]).unwrap();
    assert!(b <= 1e-12);
    assert!(make_pendulum(PendulumParams { g: 9.81, lambda: -1.0 }).is_err());
}

#[test]
fn lti_ocp_facts() {
    let sys = make_lti_ocp(lti_ocp_benchmark_params()).unwrap();
    let p = sys.riccati_solution();
    let h = sys.output(&[1.0, 1.0]);
    assert!((h[0] - (p[(1, 0)] + p[(1, 1)])).abs() < 1e-14);
    assert_eq!(sys.energy(&[0.0, 0.0]), 0.0);
    assert_eq!(sys.energy_gradient(&[0.0, 0.0]), vec![0.0, 0.0]);
    let r = hill_moylan_residual(&sys, &[1.0, 1.0]).unwrap();
    assert!(r.max() <= 1e-10, "{r}");
}

#[test]
fn pi_facts() {
    let pi = make_pi(PiParams { k_i: 1.0, k_p: 1.0 }).unwrap();
    assert_eq!(pi.full_output(&[1.0], &[2.0]), vec![3.0]);
    assert_eq!(pi.energy(&[0.0]), 0.0);
    for z in [-1.5, 0.0, 0.7] {
        assert_eq!(hill_moylan_residual(&pi, &[z]).unwrap().max(), 0.0);
    }
    assert!(continuous_power_balance_residual(&pi, &[1.0], &[1.0]).unwrap() <= 1e-13);
    assert_eq!(continuous_power_balance_residual(&pi, &[0.4], &[0.0]).unwrap(), 0.0);
}

#[test]
fn synthetic_facts() {
    let s = make_synthetic(SyntheticParams {
        alpha: 2.0,
        lambda: 1.0,
    })
    .unwrap();
    assert!((s.energy_gradient(&[1.0])[0] - 1.0).abs() < 1e-15);
    assert!((s.output(&[1.0])[0] + 1.0).abs() < 1e-15);
    let r = hill_moylan_residual(&s, &[0.8]).unwrap();
    assert!(r.max() <= 1e-13, "{r}");
    assert!(make_synthetic(SyntheticParams {
        alpha: 2.0,
        lambda: 0.0
    })
    .is_err());
}

#[test]
fn reference_controls() {
    let synth = reference_settings(ExampleName::Synthetic).unwrap();
    assert!((synth.control.eval(5.0)[0] - 0.386195).abs() < 1e-6);
    let pi = reference_settings(ExampleName::Pi).unwrap();
    assert_eq!(pi.control.eval(0.5), vec![0.25]);
    assert_eq!(pi.initial_state, vec![1.0]);
    let pend = reference_settings(ExampleName::Pendulum).unwrap();
    match pend.system {
        ExampleSystem::Pendulum(p) => assert_eq!(p.params().lambda, 0.2),
        other => panic!("wrong system {:?}", other.name()),
    }
    assert!(matches!(
        reference_settings_by_name("duffing"),
        Err(Error::UnknownExample(_))
    ));
}

#[test]
fn scalar_are_oracles() {
    let one = Matrix::scalar(1.0);
    let p = solve_are(&Matrix::scalar(0.0), &one, &one).unwrap();
    assert!((p[(0, 0)] - 1.0).abs() < 1e-12);
    let p = solve_are(&Matrix::scalar(-1.0), &one, &one).unwrap();
    assert!((p[(0, 0)] - (2f64.sqrt() - 1.0)).abs() < 1e-12);
}

#[test]
fn are_independent_of_seed_gain() {
    let prm = lti_ocp_benchmark_params();
    let p0 = solve_are(&prm.a, &prm.b, &prm.c).unwrap();
    for k in [[1.0, 2.0], [3.0, 5.0], [0.5, 10.0]] {
        let k0 = Matrix::from_rows(&[&k]);
        let p = solve_are_from_gain(&prm.a, &prm.b, &prm.c, &k0).unwrap();
        assert!(p.sub(&p0).max_abs() < 1e-11);
    }
    assert!(are_residual(&prm.a, &prm.b, &prm.c, &p0) <= 1e-10);
    let closed = prm.a.sub(&prm.b.matmul(&prm.b.transpose()).matmul(&p0));
    assert!(is_hurwitz(&closed));
}
