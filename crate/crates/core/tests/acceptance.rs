//! Release gate. Every check prints one `PASS`/`FAIL` line; run with
//! `cargo test --release --test acceptance -- --nocapture` to see them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsr_dg::bench::experiments::{convergence_study, power_balance, ConvergenceOptions, ORDER_BAND};
use qsr_dg::dgradients::{check_mean_value, consistency_error, DiscreteGradientKind, StorageFunction};
use qsr_dg::integrators::{dg_residual_at_start, integrate, InputRule, SchemeConfig, TimeGrid};
use qsr_dg::model::{continuous_power_balance_residual, hill_moylan_residual, ControlSignal, QsrSystem};
use qsr_dg::numerics::Matrix;
use qsr_dg::systems::riccati::is_hurwitz;
use qsr_dg::systems::{
    are_residual, lti_ocp_benchmark_params, make_pendulum, reference_settings, solve_are, ExampleName, PendulumParams,
};

const SEED: u64 = 20_240_601;

fn report(criterion: &str, ok: bool, detail: &str) {
    println!("{} {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn verdict(index: u32, title: &str, ok: bool) -> bool {
    println!("[{}] criterion {index} ({title})", if ok { "PASS" } else { "FAIL" });
    ok
}

fn uniform(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect()
}

#[test]
fn power_balance_at_machine_precision() {
    let grid = TimeGrid::equidistant(10.0, 1000).unwrap();
    let mut all = true;
    for name in ExampleName::ALL {
        let setup = reference_settings(name).unwrap();
        let (_, r) = power_balance(name, &setup, &SchemeConfig::default(), &grid).unwrap();
        let ok = r.max_residual <= 1e-10;
        all &= ok;
        report(
            "discrete power balance",
            ok,
            &format!("{name} max residual {:.3e} (<= 1e-10)", r.max_residual),
        );
    }
    assert!(verdict(1, "discrete power balance", all));
}

#[test]
fn second_order_convergence() {
    let mut all = true;
    for name in ExampleName::ALL {
        let setup = reference_settings(name).unwrap();
        let opts = ConvergenceOptions {
            s_max: 5,
            horizon: 10.0,
            cfg: SchemeConfig::default(),
            cache_dir: None,
            cache_tag: String::new(),
        };
        let r = convergence_study(name, &setup, &opts).unwrap();
        let median = r.finest_median_order();
        let ok = r.order_within_band();
        all &= ok;
        report(
            "second-order accuracy",
            ok,
            &format!(
                "{name} median order {median:.3} in [{}, {}], orders {:?}",
                ORDER_BAND.0, ORDER_BAND.1, r.observed_orders
            ),
        );
    }
    assert!(verdict(2, "second-order accuracy", all));
}

#[test]
fn energy_conserved_without_friction() {
    let sys = make_pendulum(PendulumParams { g: 9.81, lambda: 0.0 }).unwrap();
    let z0 = vec![std::f64::consts::FRAC_PI_4, -1.0];
    let zero = ControlSignal::zero(1);
    let drift = |cfg: &SchemeConfig, q: usize| {
        let traj = integrate(&sys, cfg, &TimeGrid::equidistant(10.0, q).unwrap(), &zero, &z0).unwrap();
        let h0 = sys.energy(&z0);
        traj.states
            .iter()
            .map(|z| (sys.energy(z) - h0).abs())
            .fold(0.0, f64::max)
    };
    let dg = drift(&SchemeConfig::default(), 1000);
    let dg_coarse = drift(&SchemeConfig::default(), 100);
    let mp = drift(&SchemeConfig::midpoint(), 100);
    let ok = dg <= 1e-10 && mp >= 10.0 * dg_coarse.max(dg);
    report(
        "energy conservation",
        ok,
        &format!("dg drift {dg:.3e} (q=1000), dg {dg_coarse:.3e} vs midpoint {mp:.3e} (q=100)"),
    );
    assert!(verdict(3, "energy conservation without friction", ok));
}

#[test]
fn discrete_gradient_axioms() {
    let kinds = [
        (DiscreteGradientKind::Gonzalez, 1e-12),
        (DiscreteGradientKind::ItohAbe, 1e-12),
        (DiscreteGradientKind::MeanValue { order: 5 }, 1e-8),
    ];
    let mut all = true;
    for name in ExampleName::ALL {
        let setup = reference_settings(name).unwrap();
        let n = setup.system.state_dim();
        for (kind, tol) in kinds {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let mut worst_mv = 0.0_f64;
            let mut worst_cons = 0.0_f64;
            let mut violations = 0;
            for _ in 0..1000 {
                let z = uniform(&mut rng, n);
                let w = uniform(&mut rng, n);
                let e = check_mean_value(kind, &setup.system, &z, &w).unwrap();
                if e > tol {
                    violations += 1;
                }
                worst_mv = worst_mv.max(e);
                worst_cons = worst_cons.max(consistency_error(kind, &setup.system, &z).unwrap());
            }
            let ok = worst_mv <= tol && worst_cons <= 1e-12;
            all &= ok;
            report(
                "discrete gradient axioms",
                ok,
                &format!(
                    "{name} {}: mean value {worst_mv:.3e} (<= {tol:e}, {violations}/1000 over), consistency {worst_cons:.3e}",
                    kind.name()
                ),
            );
        }
    }
    assert!(verdict(4, "discrete gradient axioms", all));
}

#[test]
fn hill_moylan_conditions() {
    let mut all = true;
    for name in ExampleName::ALL {
        let setup = reference_settings(name).unwrap();
        let sys = &setup.system;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut hm = 0.0_f64;
        let mut bal = 0.0_f64;
        for _ in 0..100 {
            let z = uniform(&mut rng, sys.state_dim());
            hm = hm.max(hill_moylan_residual(sys, &z).unwrap().max());
        }
        for _ in 0..100 {
            let z = uniform(&mut rng, sys.state_dim());
            let u = uniform(&mut rng, sys.port_dim());
            bal = bal.max(continuous_power_balance_residual(sys, &z, &u).unwrap());
        }
        let ok = hm <= 1e-10 && bal <= 1e-10;
        all &= ok;
        report(
            "Hill-Moylan verification",
            ok,
            &format!("{name} max r {hm:.3e}, power balance {bal:.3e}"),
        );
    }
    assert!(verdict(5, "Hill-Moylan verification", all));
}

/// Eigenvalues of a symmetric 2×2 matrix.
fn symmetric_eigenvalues(p: &Matrix) -> [f64; 2] {
    let (a, b, d) = (p[(0, 0)], p[(0, 1)], p[(1, 1)]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d).powi(2) + b * b).sqrt();
    [mean - rad, mean + rad]
}

#[test]
fn riccati_solution() {
    let prm = lti_ocp_benchmark_params();
    let p = solve_are(&prm.a, &prm.b, &prm.c).unwrap();
    let asym = p.asymmetry();
    let res = are_residual(&prm.a, &prm.b, &prm.c, &p);
    let eig = symmetric_eigenvalues(&p);
    let closed = prm.a.sub(&prm.b.matmul(&prm.b.transpose()).matmul(&p));
    let trace = closed[(0, 0)] + closed[(1, 1)];
    let det = closed.determinant();
    let hurwitz = trace < 0.0 && det > 0.0 && is_hurwitz(&closed);
    let one = Matrix::scalar(1.0);
    let p1 = solve_are(&Matrix::scalar(0.0), &one, &one).unwrap()[(0, 0)];
    let p2 = solve_are(&Matrix::scalar(-1.0), &one, &one).unwrap()[(0, 0)];
    let scalar_err = (p1 - 1.0).abs().max((p2 - (2f64.sqrt() - 1.0)).abs());
    let ok = asym <= 1e-12 && res <= 1e-10 && eig[0] > 0.0 && hurwitz && scalar_err <= 1e-12;
    report(
        "ARE correctness",
        ok,
        &format!(
            "asymmetry {asym:.1e}, residual {res:.3e}, eigenvalues ({:.6}, {:.6}), closed loop tr {trace:.4} det {det:.4}, scalar error {scalar_err:.1e}",
            eig[0], eig[1]
        ),
    );
    assert!(verdict(6, "ARE correctness", ok));
}

#[test]
fn scheme_consistency_at_start() {
    let tau = 0.01;
    let mut all = true;
    for name in ExampleName::ALL {
        let setup = reference_settings(name).unwrap();
        let sys = &setup.system;
        let cfg = SchemeConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut worst = 0.0_f64;
        let mut count = 0;
        while count < 20 {
            let z = uniform(&mut rng, sys.state_dim());
            let eta = sys.energy_gradient(&z);
            if eta.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-3 {
                continue;
            }
            let t = rng.gen_range(0.0..9.9);
            let ubar = InputRule::Trapezoidal.average(&setup.control, t, tau);
            let f = sys.vector_field(&z, &ubar);
            let r = dg_residual_at_start(sys, &cfg, &z, tau, &ubar).unwrap();
            for k in 0..z.len() {
                worst = worst.max((r[k] + tau * f[k]).abs());
            }
            count += 1;
        }
        let ok = worst <= 1e-10;
        all &= ok;
        report(
            "scheme consistency",
            ok,
            &format!("{name} max |F(z) + tau(f + B ubar)| {worst:.3e}"),
        );
    }
    assert!(verdict(7, "scheme consistency", all));
}
