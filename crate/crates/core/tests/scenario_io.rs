mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use common::*;
use uavjam::beamforming::{optimal_orientation, BeamControl, FarFieldGeometry};
use uavjam::geometry::Point;
use uavjam::io::{emit_beampattern_snapshot, read_trajectory, write_trajectory, TRAJECTORY_COLUMNS};
use uavjam::optimizer::{JammingProblem, UavState};
use uavjam::propagation::Activation;
use uavjam::runner::{run_plan, run_simulate, RunOverrides, SUMMARY_FILE, TRAJECTORY_FILE};
use uavjam::scenario::{load_scenario, Scenario};
use uavjam::sim::{LogSample, TrajectoryLog};
use uavjam::Error;

const BASE: &str = r#"
frequency_hz = 1575.42e6
nominal_power_mw = 600.0
[uav_initial]
position = [0.0, 0.0]
[client]
kind = "static"
initial = [3000.0, 3000.0]
[eavesdropper]
kind = "static"
initial = [6000.0, 6000.0]
[weights]
horizon_s = 300.0
r = [1.0, 1.0]
a_r = 0.01
u_bar = 2.0
"#;

fn parse(text: &str) -> Result<Scenario, Error> {
    Scenario::from_toml_str(text, Path::new("inline.toml"))
}

#[test]
fn static_scenario_file_loads() {
    let s = scenario("static.toml");
    let p = s.mission().problem_at(0.0);
    assert_eq!(p.client, Point::new(3000.0, 3000.0));
    assert_eq!(p.eavesdropper, Point::new(6000.0, 6000.0));
    assert_eq!(s.frequency, Some(1575.42e6));
    assert_eq!(s.nominal_power, 600.0);
    assert_eq!(s.weights.u_bar, 2.0);
    assert_eq!(s.weights, uavjam::optimizer::CostWeights::reference(300.0));
    assert!((s.wavelength - 0.19029).abs() < 1e-5);
    assert!((s.antenna_separation - 0.09515).abs() < 1e-5);
    assert_eq!(s.antenna_separation, s.wavelength / 2.0);
    assert_eq!(s.signal_power, Some(-125.0));
}

#[test]
fn wavelength_may_replace_frequency() {
    let s = parse(&BASE.replace("frequency_hz = 1575.42e6", "wavelength_m = 0.2")).unwrap();
    assert_eq!(s.wavelength, 0.2);
    assert_eq!(s.frequency, None);
    assert_eq!(s.antenna_separation, 0.1);
}

#[test]
fn field_errors_are_distinct() {
    let both = parse(&format!("wavelength_m = 0.2\n{BASE}")).unwrap_err();
    assert!(matches!(both, Error::ExclusiveFields(..)), "{both}");

    let missing = parse(&BASE.replace("nominal_power_mw = 600.0", "")).unwrap_err();
    assert!(matches!(&missing, Error::MissingField(f) if f == "nominal_power_mw"), "{missing}");

    let missing_weight = parse(&BASE.replace("a_r = 0.01", "")).unwrap_err();
    assert!(matches!(&missing_weight, Error::MissingField(f) if f == "weights.a_r"));

    let negative = parse(&BASE.replace("nominal_power_mw = 600.0", "nominal_power_mw = -1.0")).unwrap_err();
    assert!(matches!(&negative, Error::InvalidField { field, .. } if field == "nominal_power_mw"));

    let zero_bound = parse(&BASE.replace("u_bar = 2.0", "u_bar = 0.0")).unwrap_err();
    assert!(matches!(&zero_bound, Error::InvalidField { field, .. } if field == "weights.u_bar"));

    let unknown = parse(&format!("colour = \"red\"\n{BASE}")).unwrap_err();
    assert!(matches!(unknown, Error::Parse { .. }));

    let nested_unknown = parse(&BASE.replace("u_bar = 2.0", "u_bar = 2.0\nr_typo = 1.0")).unwrap_err();
    assert!(matches!(nested_unknown, Error::Parse { .. }));

    for e in [both, missing, negative] {
        assert_eq!(e.category(), "validation");
    }
}

#[test]
fn activation_modes() {
    assert_eq!(parse(&format!("activation = \"identity\"\n{BASE}")).unwrap().activation, Activation::Identity);
    let band = parse(&format!("activation = {{ lower_dbm = -110.0, upper_dbm = -60.0 }}\n{BASE}")).unwrap();
    assert!(matches!(band.activation, Activation::Band(b) if b.lower == -110.0 && b.upper == -60.0));
    assert!(parse(&format!("activation = \"relu\"\n{BASE}")).is_err());
    assert!(parse(&format!("activation = {{ lower_dbm = -60.0, upper_dbm = -70.0 }}\n{BASE}")).is_err());
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_scenario("/nonexistent/scenario.toml").unwrap_err();
    assert_eq!(err.category(), "io");
    assert!(err.to_string().contains("/nonexistent/scenario.toml"));
}

fn sample(t: f64) -> LogSample {
    LogSample {
        t,
        state: UavState::new(Point::new(1.0 / 3.0, -2e-7), Point::new(PI, 1e300)),
        control: Point::new(-0.0, 2.0),
        beam: BeamControl {
            phi1: 12.0,
            phi2: -7.5,
            theta_g: PI,
        },
        gain_e: 3.999_999_999_999_999,
        gain_c: 1.5e-32,
        power_e: -77.123_456_789_012_34,
        power_c: f64::NEG_INFINITY,
    }
}

#[test]
fn trajectory_file_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let log = TrajectoryLog {
        samples: vec![sample(0.0)],
        replans: vec![],
    };
    write_trajectory(&log, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(text.lines().next().unwrap(), TRAJECTORY_COLUMNS.join(","));
    assert!(text.trim_end().ends_with(",-inf"));

    let rows = read_trajectory(&path).unwrap();
    let s = sample(0.0);
    let expected = [
        s.t,
        s.state.position.x,
        s.state.position.y,
        s.state.velocity.x,
        s.state.velocity.y,
        s.control.x,
        s.control.y,
        12.0 - 4.0 * PI,
        -7.5 + 2.0 * PI,
        PI,
        s.gain_e,
        s.gain_c,
        s.power_e,
        s.power_c,
    ];
    for (a, b) in rows[0].iter().zip(&expected) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert!(!dir.path().join("one.csv.tmp").exists());
}

#[test]
fn empty_log_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    assert!(write_trajectory(&TrajectoryLog::default(), dir.path().join("x.csv")).is_err());
}

fn snapshot_problem(client: Point<f64>, eav: Point<f64>, separation: f64) -> JammingProblem<f64> {
    JammingProblem {
        client,
        eavesdropper: eav,
        separation,
        ..static_problem()
    }
}

#[test]
fn snapshot_matches_the_direct_far_field_pattern() {
    // kD = pi, client along 0, eavesdropper along pi/2
    let lambda = wavelength();
    let p = snapshot_problem(Point::new(5000.0, 0.0), Point::new(0.0, 5000.0), lambda / 2.0);
    let state = UavState::at_rest(Point::zero());
    let ff = p.far_field(state.position).unwrap();
    let theta_g = optimal_orientation(&ff, p.kd(), None);
    let beam = BeamControl {
        phi1: 0.0,
        phi2: 0.0,
        theta_g,
    };
    let snap = emit_beampattern_snapshot(0.0, &state, &beam, &p, 360).unwrap();
    assert_eq!(snap.angles.len(), 360);
    assert!((snap.gains[snap.nearest(FRAC_PI_2)] - 4.0).abs() <= 1e-3);
    assert!(snap.gains[snap.nearest(0.0)].abs() <= 1e-3);
    for (&a, &g) in snap.angles.iter().zip(&snap.gains) {
        assert!((g - direct_far_field(0.0, a, theta_g, PI)).abs() <= 1e-9);
        assert!((0.0..2.0 * PI).contains(&a));
    }
    let csv = snap.to_csv();
    assert!(csv.starts_with("# t="));
    assert_eq!(csv.lines().filter(|l| l.ends_with(",client")).count(), 1);
    assert_eq!(csv.lines().filter(|l| l.ends_with(",eavesdropper")).count(), 1);
}

#[test]
fn coincident_directions_null_the_eavesdropper_too() {
    let p = snapshot_problem(Point::new(3000.0, 3000.0), Point::new(6000.0, 6000.0), wavelength() / 2.0);
    let state = UavState::at_rest(Point::zero());
    let ff = p.far_field(state.position).unwrap();
    assert_eq!(ff.mu, 0.0);
    let beam = BeamControl {
        phi1: 0.0,
        phi2: 0.0,
        theta_g: optimal_orientation(&ff, p.kd(), None),
    };
    let snap = emit_beampattern_snapshot(0.0, &state, &beam, &p, 8).unwrap();
    let i = snap.nearest(ff.theta_e);
    assert_eq!(i, snap.nearest(ff.theta_c));
    assert!(snap.gains[i] <= 1e-24);
    assert!(snap.to_csv().contains(",client+eavesdropper"));
    assert!(emit_beampattern_snapshot(0.0, &state, &beam, &p, 7).is_err());
}

#[test]
fn snapshot_samples_equal_far_field_gain() {
    let p = snapshot_problem(Point::new(1000.0, -200.0), Point::new(-300.0, 4000.0), 0.3);
    let state = UavState::at_rest(Point::new(10.0, 20.0));
    let beam = BeamControl {
        phi1: 0.3,
        phi2: 1.0,
        theta_g: 0.4,
    };
    let snap = emit_beampattern_snapshot(5.0, &state, &beam, &p, 64).unwrap();
    let ff = p.far_field(state.position).unwrap();
    for (&a, &g) in snap.angles.iter().zip(&snap.gains) {
        let expected = uavjam::beamforming::far_field_beampattern(&FarFieldGeometry::new(ff.theta_c, a), 0.4, p.kd());
        assert_eq!(g, expected);
    }
}

#[test]
fn no_incentive_plan_stays_home() {
    let s = parse(&BASE.replace("a_r = 0.01", "a_r = 0.0")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_plan(&s, dir.path(), &RunOverrides::default()).unwrap();
    assert!(out.summary.converged);
    assert!(out.summary.total_cost.abs() <= 1e-6);
    assert!(Point::new(out.summary.final_position[0], out.summary.final_position[1]).norm() <= 1e-2);
}

#[test]
fn plan_outputs_are_written_and_consistent() {
    let s = scenario("static.toml");
    let dir = tempfile::tempdir().unwrap();
    let out = run_plan(&s, dir.path(), &RunOverrides::default()).unwrap();
    let rows = read_trajectory(dir.path().join(TRAJECTORY_FILE)).unwrap();
    assert_eq!(rows.len(), out.log.samples.len());
    assert!(rows.iter().all(|r| r[13] == f64::NEG_INFINITY));
    for r in &rows {
        for &angle in &r[7..10] {
            assert!(angle > -PI && angle <= PI);
        }
    }
    // crossing time versus a scan of the written power column
    let t90 = out.summary.first_crossing["-90"];
    let i = rows.iter().position(|r| r[12] >= -90.0).unwrap();
    assert!(t90 <= rows[i][0] && t90 >= rows[i - 1][0]);
    assert!(out.summary.client_null_ok);
    for t in ["0.0", "100.0", "200.0", "300.0"] {
        assert!(dir.path().join(format!("snapshot_t{t}.csv")).exists());
    }
    let summary = std::fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
    assert!(summary.contains("converged = true"));
}

#[test]
fn simulate_honours_overrides() {
    let s = scenario("moving.toml");
    let dir = tempfile::tempdir().unwrap();
    let o = RunOverrides {
        replan_interval: Some(25.0),
        horizon: Some(50.0),
        total: Some(100.0),
        dt: Some(0.5),
        resolution: Some(16),
        ..Default::default()
    };
    let out = run_simulate(&s, dir.path(), &o).unwrap();
    assert_eq!(out.summary.replans, 4);
    assert_eq!(out.log.samples.len(), 201);
    let snap = std::fs::read_to_string(dir.path().join("snapshot_t0.0.csv")).unwrap();
    assert_eq!(snap.lines().count(), 2 + 16);
}
