//! Batch entry points behind the command-line verbs.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{
    emit_beampattern_snapshot, ensure_dir, threshold_key, write_snapshot, write_summary, write_timings,
    write_trajectory, BeampatternSnapshot, SummaryReport,
};
use crate::optimizer::running_cost;
use crate::scenario::Scenario;
use crate::sim::{apply_beam_control, receding_horizon, HorizonSettings, TrajectoryLog, NULL_GAIN};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.toml";
pub const TIMINGS_FILE: &str = "timings.csv";

/// Command-line overrides of the scenario's simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOverrides {
    pub dt: Option<f64>,
    pub replan_interval: Option<f64>,
    pub horizon: Option<f64>,
    pub total: Option<f64>,
    pub resolution: Option<usize>,
}

pub const DEFAULT_RESOLUTION: usize = 360;

/// Result of a run: the summary plus the full log.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: SummaryReport,
    pub log: TrajectoryLog,
}

/// Single open-loop plan over the scenario horizon, flown in simulation.
pub fn run_plan(scenario: &Scenario, out_dir: impl AsRef<Path>, overrides: &RunOverrides) -> Result<RunOutput> {
    let horizon = overrides.horizon.unwrap_or(scenario.weights.t_f);
    let settings = HorizonSettings {
        replan_interval: horizon,
        horizon,
        total: horizon,
        dt: overrides.dt.unwrap_or(scenario.simulation.dt),
        warm_start: false,
        shrink_horizon: false,
    };
    let log = receding_horizon(&scenario.mission(), &settings)?;
    let cost = log.replans.first().map_or(f64::NAN, |r| r.cost);
    finish(scenario, log, &settings, cost, out_dir.as_ref(), overrides)
}

/// Receding-horizon simulation.
pub fn run_simulate(scenario: &Scenario, out_dir: impl AsRef<Path>, overrides: &RunOverrides) -> Result<RunOutput> {
    let base = scenario.simulation;
    let settings = HorizonSettings {
        replan_interval: overrides.replan_interval.unwrap_or(base.replan_interval),
        horizon: overrides.horizon.unwrap_or(base.horizon),
        total: overrides.total.unwrap_or(base.total),
        dt: overrides.dt.unwrap_or(base.dt),
        ..base
    };
    let log = receding_horizon(&scenario.mission(), &settings)?;
    let cost = executed_cost(scenario, &log)?;
    finish(scenario, log, &settings, cost, out_dir.as_ref(), overrides)
}

/// Cost of the flown trajectory against the moving targets, by the trapezoid rule.
pub fn executed_cost(scenario: &Scenario, log: &TrajectoryLog) -> Result<f64> {
    let mission = scenario.mission();
    let w = &scenario.weights;
    let mut total = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for s in &log.samples {
        let j = running_cost(&s.state, s.control, &mission.problem_at(s.t), w)?;
        if let Some((t0, j0)) = prev {
            total += (s.t - t0) * (j0 + j) / 2.0;
        }
        prev = Some((s.t, j));
    }
    if let Some(last) = log.samples.last() {
        total += 0.5 * w.q_f.quadratic(last.state.velocity);
        if w.a_f != 0.0 {
            let problem = mission.problem_at(last.t);
            total -= w.a_f * problem.activation.value(problem.power_at(last.state.position)?);
        }
    }
    Ok(total)
}

fn summarize(scenario: &Scenario, log: &TrajectoryLog, cost: f64) -> SummaryReport {
    let first_crossing: BTreeMap<String, f64> = scenario
        .thresholds
        .iter()
        .filter_map(|&th| log.first_crossing(th).map(|t| (threshold_key(th), t)))
        .collect();
    let max_client_gain = log.max_client_gain();
    let last = log.samples.last().map(|s| s.state.position);
    SummaryReport {
        converged: log.all_converged(),
        replans: log.replans.len(),
        failed_replans: log.replans.iter().filter(|r| !r.converged).count(),
        first_crossing,
        final_power_dbm: log.final_power().unwrap_or(f64::NAN),
        total_cost: cost,
        max_control: log.max_control(),
        max_client_gain,
        client_null_ok: max_client_gain <= NULL_GAIN,
        final_position: last.map_or([f64::NAN; 2], |p| [p.x, p.y]),
        per_replan_solve_times: log.replans.iter().map(|r| r.solve_seconds).collect(),
    }
}

fn finish(
    scenario: &Scenario,
    log: TrajectoryLog,
    settings: &HorizonSettings,
    cost: f64,
    out_dir: &Path,
    overrides: &RunOverrides,
) -> Result<RunOutput> {
    let dir = ensure_dir(out_dir)?;
    let summary = summarize(scenario, &log, cost);
    write_trajectory(&log, dir.join(TRAJECTORY_FILE))?;
    write_summary(&summary, dir.join(SUMMARY_FILE))?;
    let replan_times: Vec<f64> = log.replans.iter().map(|r| r.t).collect();
    write_timings(&summary, &replan_times, dir.join(TIMINGS_FILE))?;

    let resolution = overrides.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let mission = scenario.mission();
    for &t in &scenario.snapshot_times {
        if t > settings.total + 1e-9 {
            continue;
        }
        let i = ((t / settings.dt).round() as usize).min(log.samples.len() - 1);
        let s = &log.samples[i];
        let snap = emit_beampattern_snapshot(s.t, &s.state, &s.beam, &mission.problem_at(s.t), resolution)?;
        write_snapshot(&snap, dir.join(snapshot_file_name(s.t)))?;
    }
    Ok(RunOutput { summary, log })
}

pub fn snapshot_file_name(t: f64) -> String {
    format!("snapshot_t{t:.1}.csv")
}

/// Beampattern of the optimal beam at the scenario's initial geometry.
pub fn run_snapshot(
    scenario: &Scenario,
    out_dir: impl AsRef<Path>,
    overrides: &RunOverrides,
) -> Result<BeampatternSnapshot> {
    let mission = scenario.mission();
    let problem = mission.problem_at(0.0);
    let state = scenario.uav_initial;
    let beam = apply_beam_control(&state, problem.client, problem.eavesdropper, &problem, None, 0.0)?;
    let snap = emit_beampattern_snapshot(
        0.0,
        &state,
        &beam,
        &problem,
        overrides.resolution.unwrap_or(DEFAULT_RESOLUTION),
    )?;
    let dir = ensure_dir(out_dir.as_ref())?;
    write_snapshot(&snap, dir.join(snapshot_file_name(0.0)))?;
    Ok(snap)
}

/// Non-convergence surfaced as an error, for callers that need a failing exit status.
pub fn require_converged(summary: &SummaryReport) -> Result<()> {
    if summary.converged {
        Ok(())
    } else {
        Err(Error::Solver(format!(
            "{} of {} plans failed to converge",
            summary.failed_replans, summary.replans
        )))
    }
}
