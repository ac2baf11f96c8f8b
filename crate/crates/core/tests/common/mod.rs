#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use uavjam::geometry::Point;
use uavjam::optimizer::{CostWeights, JammingProblem, Regularization, UavState};
use uavjam::propagation::{Activation, ActivationSpec, RadioParams};
use uavjam::scenario::{load_scenario, Scenario};

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

pub fn scenario(name: &str) -> Scenario {
    load_scenario(scenario_path(name)).expect("bundled scenario loads")
}

pub fn wavelength() -> f64 {
    299_792_458.0 / 1575.42e6
}

pub fn wavenumber() -> f64 {
    2.0 * PI / wavelength()
}

/// Static experiment problem, built by hand rather than from the scenario file.
pub fn static_problem() -> JammingProblem<f64> {
    JammingProblem {
        client: Point::new(3000.0, 3000.0),
        eavesdropper: Point::new(6000.0, 6000.0),
        radio: RadioParams::new(600.0, wavenumber()).unwrap(),
        separation: wavelength() / 2.0,
        activation: Activation::Band(ActivationSpec::new(-100.0, -70.0).unwrap()),
        regularization: Regularization::default(),
    }
}

pub fn static_weights() -> CostWeights<f64> {
    CostWeights::reference(300.0)
}

pub fn origin() -> UavState<f64> {
    UavState::at_rest(Point::new(0.0, 0.0))
}

/// |e^{ja} + e^{jb}|^2 summed from real and imaginary parts.
pub fn phasor_gain(a: f64, b: f64) -> f64 {
    let re = a.cos() + b.cos();
    let im = a.sin() + b.sin();
    re * re + im * im
}

/// Two-element gain from antenna positions, evaluated without any of the crate's closed forms.
pub fn direct_gain(p: Point<f64>, p1: Point<f64>, p2: Point<f64>, k: f64, phi1: f64, phi2: f64) -> f64 {
    let d1 = ((p.x - p1.x).powi(2) + (p.y - p1.y).powi(2)).sqrt();
    let d2 = ((p.x - p2.x).powi(2) + (p.y - p2.y).powi(2)).sqrt();
    phasor_gain(k * d1 + phi1, k * d2 + phi2)
}

/// Far-field gain written out from its definition: unit phasors along the array axis.
pub fn direct_far_field(theta_c: f64, theta: f64, theta_g: f64, kd: f64) -> f64 {
    // null toward theta_c, evaluate toward theta
    let delta = |a: f64| kd * (theta_g - a).cos();
    let phase = delta(theta) - delta(theta_c) + PI;
    phasor_gain(0.0, phase)
}

pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn point_rel_err(a: Point<f64>, b: Point<f64>) -> f64 {
    let n = (a - b).norm();
    n / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}
