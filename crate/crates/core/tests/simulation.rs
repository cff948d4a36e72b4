mod common;

use common::*;
use hosm::accuracy::{default_grid, sweep_and_fit, SweepParameter};
use hosm::control::ControllerSpec;
use hosm::design::design_sliding_variable;
use hosm::linalg::Polynomial;
use hosm::plants::pendulum;
use hosm::scalar::ratio;
use hosm::sim::{integrate_held, simulate, steady_state_error, Actuator, SimConfig};
use hosm::{BigRational, Controller32, SimConfig32};

fn setup(r: usize) -> (hosm::System64, Vec<f64>, ControllerSpec<f64>) {
    let sys = pendulum::<f64>();
    let c = design_sliding_variable(&sys, &pendulum_gamma(r)).unwrap().c;
    (sys, c, ControllerSpec::default_for_order(r).unwrap())
}

#[test]
fn repeated_runs_are_bit_identical() {
    let (sys, c, spec) = setup(3);
    let cfg = SimConfig::new(1e-3, vec![1.0; 4]).with_actuator(Actuator::Lag { time_constant: 5e-3 });
    let a = simulate(&sys, &c, &spec, &cfg).unwrap();
    let b = simulate(&sys, &c, &spec, &cfg).unwrap();
    assert_eq!(a, b);
    let e = steady_state_error(&a, 0).unwrap();
    assert!(e > 0.0 && e.to_bits() == steady_state_error(&b, 0).unwrap().to_bits());
}

#[test]
fn every_hold_interval_is_converged_in_the_step() {
    for r in 1..=3 {
        let (sys, c, spec) = setup(r);
        let cfg = SimConfig::new(1e-3, vec![1.0; 4]);
        let traj = simulate(&sys, &c, &spec, &cfg).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..traj.len() - 1 {
            let mut z = traj.states[k].clone();
            integrate_held(&sys, cfg.perturbation, Actuator::None, &mut z, traj.times[k], 5e-5, 20, traj.controls[k])
                .unwrap();
            let next = &traj.states[k + 1];
            let scale = next.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
            worst = worst.max(max_abs_diff(&z, next) / scale);
        }
        assert!(worst < 1e-6, "r = {r}: {worst:e}");
    }
}

#[test]
fn halving_the_step_in_closed_loop_relay() {
    // Higher orders amplify sub-ulp differences through the non-Lipschitz
    // sampled feedback, so only the relay loop is compared in closed loop.
    let (sys, c, spec) = setup(1);
    let cfg = SimConfig::new(1e-3, vec![1.0; 4]);
    let coarse = simulate(&sys, &c, &spec, &cfg).unwrap();
    let fine = simulate(&sys, &c, &spec, &cfg.clone().with_h(5e-5)).unwrap();
    assert!(rel_diff(coarse.final_state().unwrap(), fine.final_state().unwrap()) < 1e-6);
}

#[test]
fn errors_respect_the_accuracy_law() {
    let grid = default_grid::<f64>();
    let base = SimConfig::new(1e-3, vec![1.0; 4]);
    for r in 1..=3 {
        let (sys, c, spec) = setup(r);
        let fits = sweep_and_fit(&sys, &c, &spec, &base, SweepParameter::SamplingPeriod, &grid).unwrap();
        assert_eq!(fits.len(), r);
        for f in &fits {
            let exponent = (r - f.derivative_order) as f64;
            // μᵢ anchored at the smallest τ; factor 2 absorbs the scatter of a sampled maximum.
            let violations = f.bound_violations(exponent, 2.0);
            assert!(violations.is_empty(), "r = {r}, i = {}: {violations:?}", f.derivative_order);
        }
    }
}

#[test]
fn unperturbed_relay_still_chatters_at_sampling_scale() {
    let (sys, c, spec) = setup(1);
    let cfg = SimConfig::new(1e-3, vec![1.0; 4]).with_perturbation(hosm::sim::Perturbation::none());
    let traj = simulate(&sys, &c, &spec, &cfg).unwrap();
    let e = steady_state_error(&traj, 0).unwrap();
    assert!(e > 0.0 && e < 0.05, "{e}");
}

#[test]
fn single_precision_pipeline() {
    let sys = pendulum::<f32>();
    let gamma = Polynomial::new(vec![25.0f32, 10.0, 1.0]).unwrap();
    let c = design_sliding_variable(&sys, &gamma).unwrap().c;
    for (x, y) in c.iter().zip(&PENDULUM_C[1]) {
        assert!((*x as f64 - y).abs() < 1e-4 * y.abs().max(1.0));
    }
    let spec = Controller32::quasi_continuous(2, 10.0).unwrap();
    let cfg = SimConfig32::new(1e-3, vec![1.0; 4]);
    let traj = simulate(&sys, &c, &spec, &cfg).unwrap();
    let xf = traj.final_state().unwrap();
    assert!(xf.iter().map(|v| v * v).sum::<f32>().sqrt() < 0.1);
}

#[test]
fn exact_pendulum_design_matches_floating_point() {
    let sys = pendulum::<BigRational>();
    let q = |v: i64| ratio(v, 1);
    let gamma = Polynomial::new(vec![q(125), q(75), q(15), q(1)]).unwrap();
    let d = design_sliding_variable(&sys, &gamma).unwrap();
    assert_eq!(d.realized_r, 1);
    assert_eq!(d.mismatch, 0.0);
    let as_f64: Vec<f64> = d.c.iter().map(hosm::Scalar::as_f64).collect();
    assert!(max_abs_diff(&as_f64, &PENDULUM_C[0]) < 1e-12);
}
