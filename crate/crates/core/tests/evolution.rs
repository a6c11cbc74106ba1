mod common;

use common::{max_abs, max_diff, ChOracle};
use ep_core::evolution::{
    cauchy_diagnostic, cfl_number, frozen_solution_transport, picard_solve, rk4_step, solve, solve_final,
};
use ep_core::init::{random_velocity, smooth_random};
use ep_core::ops::{h1_energy, linf_norm, TWO_THIRDS};
use ep_core::{
    BlowupGuard, DiagnosticNorms, DyadicPartition, Error, PeriodicGrid, SolverConfig, SpaceParams, VectorField,
};

fn smooth_1d(n: usize, amplitude: f64, seed: u64) -> VectorField {
    smooth_random(&PeriodicGrid::standard(1, n).unwrap(), amplitude, 1.0, seed).unwrap()
}

fn dist(a: &VectorField, b: &VectorField) -> f64 {
    linf_norm(&a.sub(b).unwrap())
}

#[test]
fn zero_data_stays_zero() {
    for dim in [1, 2] {
        let g = PeriodicGrid::standard(dim, 16).unwrap();
        let z = VectorField::zeros(&g);
        let cfg = SolverConfig {
            t_final: 0.1,
            diagnostics: Some(DiagnosticNorms { s: 2.0, p: 2.0, r: 2.0 }),
            blowup: BlowupGuard::Absolute(1.0),
            ..Default::default()
        };
        let traj = solve(&z, &cfg).unwrap();
        assert_eq!(traj.final_time(), 0.1);
        assert!(traj.states.iter().all(|u| linf_norm(u) == 0.0));
        assert!(traj.diagnostics.iter().all(|d| d.tl_norm == Some(0.0) && d.energy == 0.0 && d.grad_linf == 0.0));
        assert_eq!(linf_norm(&rk4_step(&z, 0.1, &cfg).unwrap()), 0.0);
    }
}

#[test]
fn times_strictly_increase_and_land_on_t_final() {
    let u0 = smooth_1d(128, 0.2, 1);
    let cfg = SolverConfig { dt: 0.03, t_final: 0.1, ..Default::default() };
    let traj = solve(&u0, &cfg).unwrap();
    assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(traj.final_time(), 0.1);
    assert_eq!(traj.times.len(), traj.states.len());
    assert_eq!(traj.diagnostics.len(), 5);
}

#[test]
fn rk4_converges_at_fourth_order() {
    let u0 = smooth_1d(128, 0.8, 2);
    let t = 0.8;
    let cfg = SolverConfig { t_final: t, ..Default::default() };
    let reference = solve_final(&u0, &SolverConfig { dt: 0.05 / 8.0, ..cfg.clone() }).unwrap();
    let dts = [0.2, 0.1, 0.05];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| dist(&solve_final(&u0, &SolverConfig { dt, ..cfg.clone() }).unwrap(), &reference))
        .collect();
    let slope = ep_core::stats::loglog_slope(&dts, &errs);
    assert!(slope >= 3.7, "slope {slope}, errors {errs:?}");
}

#[test]
fn one_step_against_two_half_steps() {
    let u0 = smooth_1d(128, 0.8, 3);
    let cfg = SolverConfig::default();
    let gaps: Vec<f64> = [0.2, 0.1]
        .iter()
        .map(|&dt| {
            let one = rk4_step(&u0, dt, &cfg).unwrap();
            let two = rk4_step(&rk4_step(&u0, 0.5 * dt, &cfg).unwrap(), 0.5 * dt, &cfg).unwrap();
            dist(&one, &two)
        })
        .collect();
    // Local error is O(dt⁵): halving dt shrinks the gap about 32-fold.
    let ratio = gaps[0] / gaps[1];
    assert!(ratio > 24.0, "ratio {ratio}");
}

#[test]
fn matches_independent_camassa_holm_integrator() {
    let n = 256;
    let u0 = smooth_1d(n, 0.5, 4);
    let (dt, steps) = (0.01, 100);
    let cfg = SolverConfig { dt, t_final: dt * steps as f64, ..Default::default() };
    let ours = solve_final(&u0, &cfg).unwrap();
    let oracle = ChOracle::new(n, u0.grid().period(), TWO_THIRDS);
    let theirs = oracle.integrate(u0.component(0).samples(), dt, steps);
    let err = max_diff(ours.component(0).samples(), &theirs) / max_abs(&theirs);
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn camassa_holm_energy_is_conserved() {
    let u0 = smooth_1d(256, 0.5, 5);
    let cfg = SolverConfig { dt: 0.01, t_final: 2.0, ..Default::default() };
    let traj = solve(&u0, &cfg).unwrap();
    let e0 = traj.diagnostics[0].energy;
    let drift = traj.diagnostics.iter().map(|d| (d.energy - e0).abs() / e0).fold(0.0, f64::max);
    assert!(drift <= 1e-6, "{drift}");
    assert_eq!(e0, h1_energy(&u0));
}

#[test]
fn solve_is_deterministic() {
    let g = PeriodicGrid::standard(2, 32).unwrap();
    let u0 = random_velocity(&g, 4, 6).scale(0.05);
    let cfg = SolverConfig { dt: 0.05, t_final: 0.2, ..Default::default() };
    let a = solve_final(&u0, &cfg).unwrap();
    let b = solve_final(&u0, &cfg).unwrap();
    for (x, y) in a.components().iter().zip(b.components()) {
        assert_eq!(x.samples(), y.samples());
    }
}

#[test]
fn cfl_violation_is_reported_and_recovered() {
    let u0 = smooth_1d(128, 2.0, 7);
    let cfg = SolverConfig { dt: 10.0, t_final: 10.0, cfl_safety: 0.5, ..Default::default() };
    match rk4_step(&u0, 10.0, &cfg) {
        Err(Error::CflViolation { cfl, suggested_dt }) => {
            assert!(cfl > 0.5);
            assert_eq!(suggested_dt, 5.0);
        }
        other => panic!("expected a CFL violation, got {other:?}"),
    }
    let traj = solve(&u0, &cfg.with_t_final(0.5)).unwrap();
    let steps: Vec<f64> = traj.times.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.iter().all(|h| cfl_number(&u0, *h, cfg.dealias_fraction) <= 0.5 * 1.5));
}

#[test]
fn blowup_guard_returns_partial_trajectory() {
    let u0 = smooth_1d(128, 1.0, 8);
    let cfg = SolverConfig { dt: 0.05, t_final: 5.0, blowup: BlowupGuard::RelativeToInitial(1.0 + 1e-9), ..Default::default() };
    match solve(&u0, &cfg) {
        Err(Error::BlowupDetected { time, grad_linf, threshold, partial }) => {
            assert!(time > 0.0 && time <= 5.0);
            assert!(grad_linf > threshold);
            assert!(partial.final_time() < time);
            assert_eq!(partial.initial_state().component(0).samples(), u0.component(0).samples());
        }
        other => panic!("expected blow-up, got {:?}", other.map(|t| t.final_time())),
    }
}

#[test]
fn first_picard_iterate_is_frozen_low_pass_data() {
    let u0 = smooth_1d(128, 0.3, 9);
    let part = DyadicPartition::new(u0.grid());
    let cfg = SolverConfig { dt: 0.05, t_final: 0.3, ..Default::default() };
    let its = picard_solve(&u0, 3, &cfg, &part).unwrap();
    assert_eq!(its.len(), 4);
    assert!(its[0].states.iter().all(|u| linf_norm(u) == 0.0));
    let s1 = part.low_pass_vector(&u0, 1).unwrap();
    for state in &its[1].states {
        assert_eq!(state.component(0).samples(), s1.component(0).samples());
    }
    for (n, it) in its.iter().enumerate().skip(1) {
        let sn = part.low_pass_vector(&u0, n as i32).unwrap();
        assert_eq!(it.initial_state().component(0).samples(), sn.component(0).samples());
    }
}

#[test]
fn nonlinear_solution_is_a_fixed_point_of_the_transport_step() {
    let u0 = smooth_1d(128, 0.5, 10);
    let cfg = SolverConfig { dt: 0.02, t_final: 0.5, ..Default::default() };
    let (u, w) = frozen_solution_transport(&u0, &cfg).unwrap();
    let gap = dist(u.final_state(), w.final_state()) / linf_norm(u.final_state());
    assert!(gap <= 1e-6, "{gap}");
    let direct = solve_final(&u0, &cfg).unwrap();
    assert!(dist(&direct, u.final_state()) <= 1e-12 * linf_norm(&direct));
}

#[test]
fn cauchy_diagnostic_properties() {
    let u0 = smooth_1d(256, 0.3, 11);
    let part = DyadicPartition::new(u0.grid());
    let cfg = SolverConfig { dt: 0.05, t_final: 0.5, ..Default::default() };
    let its = picard_solve(&u0, 6, &cfg, &part).unwrap();
    let sp = SpaceParams::besov(1.0, 2.0, f64::INFINITY).unwrap();
    let b1 = cauchy_diagnostic(&its, 1, &sp, &part).unwrap();
    let b3 = cauchy_diagnostic(&its, 3, &sp, &part).unwrap();
    assert_eq!(b1.len(), 6);
    assert_eq!(b3.len(), 4);
    for n in 0..b3.len() {
        assert!(b3[n] <= (b1[n] + b1[n + 1] + b1[n + 2]) * (1.0 + 1e-12));
    }
    let same = vec![its[2].clone(), its[2].clone()];
    assert_eq!(cauchy_diagnostic(&same, 1, &sp, &part).unwrap(), vec![0.0]);
    assert!(matches!(
        cauchy_diagnostic(&its[..2], 2, &sp, &part),
        Err(Error::InsufficientIterates { needed: 3, available: 2 })
    ));
    let tl = SpaceParams::triebel_lizorkin(2.0, 2.0, 2.0).unwrap();
    let sup: Vec<f64> = its
        .iter()
        .map(|t| t.states.iter().map(|u| part.tl_norm(u, &tl).unwrap()).fold(0.0, f64::max))
        .collect();
    let head = sup[1..4].iter().copied().fold(0.0, f64::max);
    assert!(sup.iter().all(|&v| v <= 2.0 * head), "{sup:?}");
}

#[test]
fn invalid_configurations_are_rejected() {
    let u0 = smooth_1d(64, 0.1, 12);
    for cfg in [
        SolverConfig { dt: 0.0, ..Default::default() },
        SolverConfig { cfl_safety: 1.5, ..Default::default() },
        SolverConfig { dealias_fraction: 0.0, ..Default::default() },
        SolverConfig { record_every: 0, ..Default::default() },
        SolverConfig { blowup: BlowupGuard::Absolute(-1.0), ..Default::default() },
    ] {
        assert!(matches!(solve(&u0, &cfg), Err(Error::InvalidParameter(_))));
    }
}
