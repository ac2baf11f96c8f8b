mod common;

use common::*;
use uavjam::beamforming::beampattern;
use uavjam::geometry::{ArrayGeometry, Point};
use uavjam::optimizer::{midpoint_guess, solve_bvp, JammingProblem, SolverOptions, UavState};
use uavjam::propagation::jamming_power_dbm;
use uavjam::sim::{
    apply_beam_control, integrate_dynamics, receding_horizon, BeamController, HorizonSettings, Mission,
    TargetMotion,
};

fn mission(client: TargetMotion, eavesdropper: TargetMotion, horizon: f64) -> Mission {
    let p = static_problem();
    Mission {
        client,
        eavesdropper,
        uav_initial: origin(),
        radio: p.radio,
        separation: p.separation,
        activation: p.activation,
        regularization: p.regularization,
        weights: uavjam::optimizer::CostWeights::reference(horizon),
        solver: SolverOptions::default(),
    }
}

fn static_targets() -> (TargetMotion, TargetMotion) {
    let p = static_problem();
    (TargetMotion::fixed(p.client), TargetMotion::fixed(p.eavesdropper))
}

#[test]
fn stationary_geometry_gives_constant_beam() {
    let problem = JammingProblem {
        client: Point::new(3000.0, 1000.0),
        ..static_problem()
    };
    let state = UavState::at_rest(Point::new(-200.0, 50.0));
    let mut ctl = BeamController::new(problem.radio.wavenumber);
    let first = ctl.update(0.0, &state, problem.client, problem.eavesdropper, &problem).unwrap();
    assert_eq!(first.phi1, 0.0);
    for i in 1..100 {
        let b = ctl.update(i as f64 * 0.1, &state, problem.client, problem.eavesdropper, &problem).unwrap();
        assert_eq!(b, first);
    }
}

#[test]
fn null_tracks_a_moving_client() {
    let problem = static_problem();
    let client = TargetMotion::WaypointSequence {
        initial: [3000.0, 3000.0],
        waypoints: vec![[30.0, 3100.0, 2900.0], [60.0, 2500.0, 3300.0]],
    };
    let eav = TargetMotion::ConstantVelocity {
        initial: [6000.0, 6000.0],
        velocity: [-3.0, 4.0],
    };
    let traj = integrate_dynamics(&origin(), |t| Point::new(0.5 * (0.1 * t).cos(), 0.3), 0.1, 60.0);
    let mut ctl = BeamController::new(problem.radio.wavenumber);
    for (t, s) in traj {
        let (c, e) = (client.position_at(t), eav.position_at(t));
        let b = ctl.update(t, &s, c, e, &problem).unwrap();
        let geom = ArrayGeometry::new(s.position, b.theta_g, problem.separation, problem.radio.wavenumber).unwrap();
        let (p1, p2) = geom.antennas();
        let k = problem.radio.wavenumber;
        assert!(direct_gain(c, p1, p2, k, b.phi1, b.phi2) <= 1e-12, "t = {t}");
        // and the crate's own evaluation agrees
        assert!(beampattern(c, &geom, b.phi1, b.phi2).unwrap() <= 1e-12);
    }
}

#[test]
fn one_replan_equals_a_single_solve() {
    let (c, e) = static_targets();
    let m = mission(c, e, 300.0);
    let log = receding_horizon(&m, &HorizonSettings::new(300.0, 300.0, 300.0)).unwrap();
    assert_eq!(log.replans.len(), 1);
    let problem = static_problem();
    let guess = midpoint_guess(&problem, &origin(), &m.weights, m.solver.nodes);
    let sol = solve_bvp(&problem, &m.weights, &origin(), &guess, &m.solver).unwrap();
    assert_eq!(log.replans[0].cost, sol.cost);
    assert_eq!(log.samples.len(), 3001);
    for s in log.samples.iter().step_by(100) {
        assert_eq!(s.control, sol.control_at(s.t));
        let planned = sol.state_at(s.t);
        assert!((s.state.position - planned.position).norm() <= 0.05, "t = {}", s.t);
    }
}

#[test]
fn frozen_targets_replans_agree_with_one_long_plan() {
    let (c, e) = static_targets();
    let m = mission(c, e, 300.0);
    let single = receding_horizon(&m, &HorizonSettings::new(300.0, 300.0, 300.0)).unwrap();
    let settings = HorizonSettings {
        warm_start: false,
        shrink_horizon: true,
        ..HorizonSettings::new(50.0, 300.0, 300.0)
    };
    let replanned = receding_horizon(&m, &settings).unwrap();
    assert_eq!(replanned.replans.len(), 6);
    assert!(replanned.all_converged());
    let mut worst: f64 = 0.0;
    for (a, b) in single.samples.iter().zip(&replanned.samples) {
        worst = worst.max((a.state.position - b.state.position).norm());
    }
    // positions are kilometres; solver tolerance is scaled by 1 km
    assert!(worst <= 1.0, "max deviation {worst} m");
}

#[test]
fn log_invariants_hold_on_a_moving_run() {
    let m = mission(
        TargetMotion::ConstantVelocity {
            initial: [3000.0, 3000.0],
            velocity: [0.0, 4.0],
        },
        TargetMotion::ConstantVelocity {
            initial: [6000.0, 6000.0],
            velocity: [-2.0, 0.0],
        },
        150.0,
    );
    let log = receding_horizon(&m, &HorizonSettings::new(20.0, 150.0, 300.0)).unwrap();
    assert_eq!(log.replans.len(), 15);
    assert!(log.samples.windows(2).all(|w| w[1].t > w[0].t));
    assert!(log.max_client_gain() <= 1e-12);
    assert!(log.max_control() <= 2.0);
    assert!(log.samples.iter().all(|s| s.power_c == f64::NEG_INFINITY));
}

#[test]
fn radial_approach_with_full_gain_raises_power() {
    // client abeam at 90 degrees keeps |mu| above the threshold, so B* = 4 throughout
    let problem = JammingProblem {
        client: Point::new(0.0, 4000.0),
        eavesdropper: Point::new(8000.0, 0.0),
        ..static_problem()
    };
    let start = UavState::new(Point::new(0.0, 0.0), Point::new(20.0, 0.0));
    let traj = integrate_dynamics(&start, |_| Point::zero(), 0.1, 200.0);
    let mut prev = f64::NEG_INFINITY;
    for (_, s) in traj {
        let beam = apply_beam_control(&s, problem.client, problem.eavesdropper, &problem, None, 0.0).unwrap();
        let geom = ArrayGeometry::new(s.position, beam.theta_g, problem.separation, problem.radio.wavenumber).unwrap();
        let g = beampattern(problem.eavesdropper, &geom, beam.phi1, beam.phi2).unwrap();
        assert!(g > 4.0 - 1e-3);
        let p = jamming_power_dbm(g, s.position.distance(problem.eavesdropper), &problem.radio).unwrap();
        assert!(p > prev);
        prev = p;
    }
}

#[test]
fn failed_replan_keeps_the_previous_plan() {
    let (c, e) = static_targets();
    let mut m = mission(c, e, 100.0);
    m.solver.max_iterations = 0;
    m.solver.descent_iterations = 0;
    let log = receding_horizon(&m, &HorizonSettings::new(25.0, 100.0, 100.0)).unwrap();
    assert_eq!(log.replans.len(), 4);
    assert!(!log.replans[0].converged && !log.replans[0].stale);
    assert!(log.replans[1..].iter().all(|r| r.stale && !r.converged));
    assert!(log.max_client_gain() <= 1e-12);
}

#[test]
fn bad_timing_is_rejected() {
    let (c, e) = static_targets();
    let m = mission(c, e, 100.0);
    assert!(receding_horizon(&m, &HorizonSettings::new(150.0, 100.0, 300.0)).is_err());
    let ragged = HorizonSettings {
        dt: 0.3,
        ..HorizonSettings::new(20.0, 100.0, 100.0)
    };
    assert!(receding_horizon(&m, &ragged).is_err());
}
