//! Scenario files: TOML schema, validation and conversion into solver inputs.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::optimizer::{CostWeights, Regularization, SolverOptions, Sym2, UavState};
use crate::propagation::{Activation, ActivationSpec, RadioParams};
use crate::sim::{HorizonSettings, Mission, TargetMotion};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    seed: Option<u64>,
    frequency_hz: Option<f64>,
    wavelength_m: Option<f64>,
    antenna_separation_m: Option<f64>,
    nominal_power_mw: Option<f64>,
    signal_power_dbm: Option<f64>,
    activation: Option<RawActivation>,
    thresholds_dbm: Option<Vec<f64>>,
    snapshot_times_s: Option<Vec<f64>>,
    uav_initial: Option<RawState>,
    client: Option<TargetMotion>,
    eavesdropper: Option<TargetMotion>,
    weights: Option<RawWeights>,
    simulation: Option<RawSimulation>,
    solver: Option<RawSolver>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawActivation {
    Named(String),
    Band(RawBand),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBand {
    lower_dbm: f64,
    upper_dbm: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    position: Option<[f64; 2]>,
    velocity: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    horizon_s: Option<f64>,
    r: Option<[f64; 2]>,
    q_r: Option<[[f64; 2]; 2]>,
    q_f: Option<[[f64; 2]; 2]>,
    a_r: Option<f64>,
    a_f: Option<f64>,
    u_bar: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    dt: Option<f64>,
    replan_interval: Option<f64>,
    horizon: Option<f64>,
    total: Option<f64>,
    warm_start: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    tolerance: Option<f64>,
    max_iterations: Option<usize>,
    nodes: Option<usize>,
    max_nodes: Option<usize>,
    gain_floor: Option<f64>,
}

/// Validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub client: TargetMotion,
    pub eavesdropper: TargetMotion,
    pub uav_initial: UavState<f64>,
    pub frequency: Option<f64>,
    pub wavelength: f64,
    pub antenna_separation: f64,
    pub nominal_power: f64,
    pub weights: CostWeights<f64>,
    pub activation: Activation<f64>,
    /// Protected-link signal level; informational only.
    pub signal_power: Option<f64>,
    pub seed: u64,
    pub thresholds: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub simulation: HorizonSettings,
    pub solver: SolverOptions<f64>,
    pub regularization: Regularization<f64>,
}

fn require<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::MissingField(name.to_string()))
}

fn positive(v: f64, name: &str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::field(name, format!("must be positive, got {v}")))
    }
}

fn finite(v: f64, name: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::field(name, "must be finite"))
    }
}

fn sym2(m: [[f64; 2]; 2], name: &str) -> Result<Sym2<f64>> {
    if m.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::field(name, "must be finite"));
    }
    if m[0][1] != m[1][0] {
        return Err(Error::field(name, "must be symmetric"));
    }
    let s = Sym2::new(m[0][0], m[0][1], m[1][1]);
    if !s.is_psd() {
        return Err(Error::field(name, "must be positive semidefinite"));
    }
    Ok(s)
}

fn motion(m: Option<TargetMotion>, name: &str) -> Result<TargetMotion> {
    let m = require(m, name)?;
    m.validate().map_err(|e| Error::field(name, e.to_string()))?;
    Ok(m)
}

impl Scenario {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.message().to_string(),
        })?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawScenario) -> Result<Self> {
        let (frequency, wavelength) = match (raw.frequency_hz, raw.wavelength_m) {
            (Some(_), Some(_)) => {
                return Err(Error::ExclusiveFields("frequency_hz".into(), "wavelength_m".into()));
            }
            (None, None) => return Err(Error::MissingField("frequency_hz or wavelength_m".into())),
            (Some(f), None) => {
                let f = positive(f, "frequency_hz")?;
                (Some(f), SPEED_OF_LIGHT / f)
            }
            (None, Some(l)) => (None, positive(l, "wavelength_m")?),
        };
        let antenna_separation = match raw.antenna_separation_m {
            Some(d) => positive(d, "antenna_separation_m")?,
            None => wavelength / 2.0,
        };
        let nominal_power = positive(require(raw.nominal_power_mw, "nominal_power_mw")?, "nominal_power_mw")?;
        let signal_power = raw.signal_power_dbm.map(|s| finite(s, "signal_power_dbm")).transpose()?;

        let activation = match raw.activation {
            None => Activation::Band(ActivationSpec::default()),
            Some(RawActivation::Named(name)) if name == "identity" => Activation::Identity,
            Some(RawActivation::Named(name)) => {
                return Err(Error::field("activation", format!("unknown mode `{name}`")));
            }
            Some(RawActivation::Band(b)) => Activation::Band(
                ActivationSpec::new(b.lower_dbm, b.upper_dbm).map_err(|e| Error::field("activation", e.to_string()))?,
            ),
        };

        let uav = require(raw.uav_initial, "uav_initial")?;
        let pos = require(uav.position, "uav_initial.position")?;
        let vel = uav.velocity.unwrap_or([0.0, 0.0]);
        for (v, name) in [(pos, "uav_initial.position"), (vel, "uav_initial.velocity")] {
            finite(v[0], name)?;
            finite(v[1], name)?;
        }
        let uav_initial = UavState::new(Point::new(pos[0], pos[1]), Point::new(vel[0], vel[1]));

        let client = motion(raw.client, "client")?;
        let eavesdropper = motion(raw.eavesdropper, "eavesdropper")?;

        let w = require(raw.weights, "weights")?;
        let r = require(w.r, "weights.r")?;
        let weights = CostWeights {
            r: [positive(r[0], "weights.r")?, positive(r[1], "weights.r")?],
            q_r: sym2(w.q_r.unwrap_or([[0.0; 2]; 2]), "weights.q_r")?,
            q_f: sym2(w.q_f.unwrap_or([[0.0; 2]; 2]), "weights.q_f")?,
            a_r: nonnegative(require(w.a_r, "weights.a_r")?, "weights.a_r")?,
            a_f: nonnegative(w.a_f.unwrap_or(0.0), "weights.a_f")?,
            u_bar: positive(require(w.u_bar, "weights.u_bar")?, "weights.u_bar")?,
            t_f: positive(require(w.horizon_s, "weights.horizon_s")?, "weights.horizon_s")?,
        };

        let sim = raw.simulation.unwrap_or_default();
        let horizon = positive(sim.horizon.unwrap_or(weights.t_f), "simulation.horizon")?;
        let simulation = HorizonSettings {
            replan_interval: positive(sim.replan_interval.unwrap_or(horizon), "simulation.replan_interval")?,
            horizon,
            total: positive(sim.total.unwrap_or(horizon), "simulation.total")?,
            dt: positive(sim.dt.unwrap_or(0.1), "simulation.dt")?,
            warm_start: sim.warm_start.unwrap_or(true),
            shrink_horizon: false,
        };

        let mut solver = SolverOptions::default();
        let mut regularization = Regularization::default();
        if let Some(s) = raw.solver {
            if let Some(t) = s.tolerance {
                solver.tolerance = positive(t, "solver.tolerance")?;
            }
            if let Some(n) = s.max_iterations {
                solver.max_iterations = n;
            }
            if let Some(n) = s.nodes {
                if n < 3 {
                    return Err(Error::field("solver.nodes", "needs at least 3 nodes"));
                }
                solver.nodes = n;
            }
            if let Some(n) = s.max_nodes {
                solver.max_nodes = n;
            }
            if let Some(f) = s.gain_floor {
                regularization.b_floor = positive(f, "solver.gain_floor")?;
            }
        }

        let thresholds = raw.thresholds_dbm.unwrap_or_else(|| vec![-100.0, -90.0]);
        for &t in &thresholds {
            finite(t, "thresholds_dbm")?;
        }
        let snapshot_times = raw.snapshot_times_s.unwrap_or_default();
        for &t in &snapshot_times {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::field("snapshot_times_s", "times must be finite and nonnegative"));
            }
        }

        let scenario = Scenario {
            client,
            eavesdropper,
            uav_initial,
            frequency,
            wavelength,
            antenna_separation,
            nominal_power,
            weights,
            activation,
            signal_power,
            seed: raw.seed.unwrap_or(0),
            thresholds,
            snapshot_times,
            simulation,
            solver,
            regularization,
        };
        let p0 = scenario.uav_initial.position;
        let problem = scenario.mission().problem_at(0.0);
        if problem.client == problem.eavesdropper {
            return Err(Error::field("eavesdropper", "coincides with the client at t = 0"));
        }
        if p0 == problem.client || p0 == problem.eavesdropper {
            return Err(Error::field("uav_initial.position", "coincides with a target at t = 0"));
        }
        Ok(scenario)
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    pub fn radio(&self) -> RadioParams<f64> {
        RadioParams {
            nominal_power: self.nominal_power,
            wavenumber: self.wavenumber(),
        }
    }

    pub fn mission(&self) -> Mission {
        Mission {
            client: self.client.clone(),
            eavesdropper: self.eavesdropper.clone(),
            uav_initial: self.uav_initial,
            radio: self.radio(),
            separation: self.antenna_separation,
            activation: self.activation,
            regularization: self.regularization,
            weights: self.weights,
            solver: self.solver.clone(),
        }
    }
}

fn nonnegative(v: f64, name: &str) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::field(name, format!("must be nonnegative, got {v}")))
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::from_toml_str(&text, path)
}
