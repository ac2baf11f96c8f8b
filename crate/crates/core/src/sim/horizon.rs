use std::time::Instant;

use super::beam::BeamController;
use super::log::{LogSample, ReplanRecord, TrajectoryLog, NULL_GAIN};
use super::motion::TargetMotion;
use crate::beamforming::beampattern;
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Point};
use crate::ode::rk4_step;
use crate::optimizer::{
    midpoint_guess, solve_bvp, BvpSolution, CostWeights, JammingProblem, Regularization, SolverOptions, UavState,
};
use crate::propagation::{jamming_power_dbm, null_power, Activation, RadioParams};

/// Everything the replanning loop needs apart from its timing.
#[derive(Debug, Clone, PartialEq)]
pub struct Mission {
    pub client: TargetMotion,
    pub eavesdropper: TargetMotion,
    pub uav_initial: UavState<f64>,
    pub radio: RadioParams<f64>,
    pub separation: f64,
    pub activation: Activation<f64>,
    pub regularization: Regularization<f64>,
    /// Weights for each plan; `t_f` is replaced by the planning horizon.
    pub weights: CostWeights<f64>,
    pub solver: SolverOptions<f64>,
}

impl Mission {
    /// Planning problem with targets frozen at time `t`.
    pub fn problem_at(&self, t: f64) -> JammingProblem<f64> {
        JammingProblem {
            client: self.client.position_at(t),
            eavesdropper: self.eavesdropper.position_at(t),
            radio: self.radio,
            separation: self.separation,
            activation: self.activation,
            regularization: self.regularization,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonSettings {
    pub replan_interval: f64,
    pub horizon: f64,
    pub total: f64,
    pub dt: f64,
    /// Seed each solve with the previous plan shifted in time.
    pub warm_start: bool,
    /// Clip each planning horizon so it never extends past `total`.
    pub shrink_horizon: bool,
}

impl HorizonSettings {
    pub fn new(replan_interval: f64, horizon: f64, total: f64) -> Self {
        HorizonSettings {
            replan_interval,
            horizon,
            total,
            dt: 0.1,
            warm_start: true,
            shrink_horizon: false,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.replan_interval) && ok(self.horizon) && ok(self.total) && ok(self.dt)) {
            return Err(Error::input("replan interval, horizon, total and dt must be positive"));
        }
        if !(self.replan_interval <= self.horizon && self.horizon <= self.total) {
            return Err(Error::input("need replan_interval <= horizon <= total"));
        }
        Ok(())
    }
}

fn whole_steps(span: f64, dt: f64, what: &str) -> Result<usize> {
    let n = (span / dt).round();
    if n < 1.0 || (n * dt - span).abs() > 1e-9 * span.max(1.0) {
        return Err(Error::input(format!("{what} must be a whole number of time steps")));
    }
    Ok(n as usize)
}

struct ActivePlan {
    start: f64,
    solution: BvpSolution<f64>,
}

impl ActivePlan {
    fn control(&self, t: f64) -> Point<f64> {
        let tau = t - self.start;
        if tau <= self.solution.horizon() {
            self.solution.control_at(tau)
        } else {
            Point::zero()
        }
    }
}

fn control(plan: &Option<ActivePlan>, t: f64) -> Point<f64> {
    plan.as_ref().map_or(Point::zero(), |p| p.control(t))
}

/// Replans every `replan_interval` seconds against frozen target positions, flies each plan
/// open loop and recomputes the beam every `dt`.
pub fn receding_horizon(mission: &Mission, settings: &HorizonSettings) -> Result<TrajectoryLog> {
    settings.validate()?;
    mission.weights.validate()?;
    mission.client.validate()?;
    mission.eavesdropper.validate()?;
    let dt = settings.dt;
    let n_total = whole_steps(settings.total, dt, "total")?;
    let every = whole_steps(settings.replan_interval, dt, "replan interval")?;

    let mut log = TrajectoryLog {
        samples: Vec::with_capacity(n_total + 1),
        replans: Vec::new(),
    };
    let mut state = mission.uav_initial;
    let mut plan: Option<ActivePlan> = None;
    let mut beams = BeamController::new(mission.radio.wavenumber);
    let k = mission.radio.wavenumber;

    for i in 0..=n_total {
        let t = i as f64 * dt;
        if i % every == 0 && i < n_total {
            let record = replan(mission, settings, t, &state, &mut plan);
            log.replans.push(record);
        }

        let client = mission.client.position_at(t);
        let eavesdropper = mission.eavesdropper.position_at(t);
        let problem = mission.problem_at(t);
        let beam = beams.update(t, &state, client, eavesdropper, &problem)?;
        let geom = ArrayGeometry::new(state.position, beam.theta_g, mission.separation, k)?;
        let gain_e = beampattern(eavesdropper, &geom, beam.phi1, beam.phi2)?;
        let gain_c = beampattern(client, &geom, beam.phi1, beam.phi2)?;
        let power_e = jamming_power_dbm(gain_e, state.position.distance(eavesdropper), &mission.radio)?;
        let power_c = if gain_c <= NULL_GAIN {
            null_power()
        } else {
            jamming_power_dbm(gain_c, state.position.distance(client), &mission.radio)?
        };
        log.samples.push(LogSample {
            t,
            state,
            control: control(&plan, t),
            beam,
            gain_e,
            gain_c,
            power_e,
            power_c,
        });

        if i < n_total {
            let y = [
                state.position.x,
                state.position.y,
                state.velocity.x,
                state.velocity.y,
            ];
            let mut f = |s: f64, z: &[f64; 4]| {
                let u = control(&plan, s);
                Ok::<_, std::convert::Infallible>([z[2], z[3], u.x, u.y])
            };
            let y = match rk4_step(&mut f, t, &y, dt) {
                Ok(v) => v,
                Err(e) => match e {},
            };
            state = UavState::new(Point::new(y[0], y[1]), Point::new(y[2], y[3]));
        }
    }
    Ok(log)
}

fn replan(
    mission: &Mission,
    settings: &HorizonSettings,
    t: f64,
    state: &UavState<f64>,
    plan: &mut Option<ActivePlan>,
) -> ReplanRecord {
    let horizon = if settings.shrink_horizon {
        settings.horizon.min(settings.total - t)
    } else {
        settings.horizon
    };
    let weights = CostWeights {
        t_f: horizon,
        ..mission.weights
    };
    let problem = mission.problem_at(t);
    let nodes = mission.solver.nodes;
    let guess = match plan {
        Some(p) if settings.warm_start && p.solution.converged => p.solution.shifted(t - p.start, horizon, nodes),
        _ => midpoint_guess(&problem, state, &weights, nodes),
    };
    let clock = Instant::now();
    let outcome = solve_bvp(&problem, &weights, state, &guess, &mission.solver);
    let solve_seconds = clock.elapsed().as_secs_f64();

    match outcome {
        Ok(solution) => {
            let mut record = ReplanRecord {
                t,
                converged: solution.converged,
                iterations: solution.iterations,
                cost: solution.cost,
                max_defect: solution.max_defect,
                solve_seconds,
                stale: false,
                error: None,
            };
            if solution.converged || plan.is_none() {
                // with nothing to fall back on, fly the best iterate
                *plan = Some(ActivePlan { start: t, solution });
            } else {
                record.stale = true;
            }
            record
        }
        Err(e) => ReplanRecord {
            t,
            converged: false,
            iterations: 0,
            cost: f64::NAN,
            max_defect: f64::NAN,
            solve_seconds,
            stale: true,
            error: Some(e.to_string()),
        },
    }
}
