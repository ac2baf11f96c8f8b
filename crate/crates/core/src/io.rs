//! Delimited-text output: trajectory logs, beampattern snapshots and run summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::beamforming::{far_field_beampattern, BeamControl, FarFieldGeometry};
use crate::error::{Error, Result};
use crate::optimizer::{JammingProblem, UavState};
use crate::scalar::wrap_angle;
use crate::sim::TrajectoryLog;

pub const TRAJECTORY_COLUMNS: [&str; 14] = [
    "t",
    "x_g",
    "y_g",
    "vx",
    "vy",
    "ux",
    "uy",
    "phi1",
    "phi2",
    "theta_g",
    "gain_e",
    "gain_c",
    "power_e_dbm",
    "power_c_dbm",
];

/// 17 significant digits; negative infinity as `-inf`.
pub fn format_float(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn parse_float(s: &str) -> Option<f64> {
    s.trim().parse().ok()
}

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    let tmp = path.with_file_name(name);
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn trajectory_csv(log: &TrajectoryLog) -> String {
    let mut out = TRAJECTORY_COLUMNS.join(",");
    out.push('\n');
    for s in &log.samples {
        let row = [
            s.t,
            s.state.position.x,
            s.state.position.y,
            s.state.velocity.x,
            s.state.velocity.y,
            s.control.x,
            s.control.y,
            wrap_angle(s.beam.phi1),
            wrap_angle(s.beam.phi2),
            wrap_angle(s.beam.theta_g),
            s.gain_e,
            s.gain_c,
            s.power_e,
            s.power_c,
        ];
        let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_trajectory(log: &TrajectoryLog, path: impl AsRef<Path>) -> Result<()> {
    if log.samples.is_empty() {
        return Err(Error::input("cannot write an empty trajectory log"));
    }
    write_atomic(path.as_ref(), trajectory_csv(log).as_bytes())
}

/// Reads a file written by [`write_trajectory`] back into rows of [`TRAJECTORY_COLUMNS`].
pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Vec<[f64; 14]>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, message: String| Error::Format {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    if header != TRAJECTORY_COLUMNS.join(",") {
        return Err(bad(1, "unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != TRAJECTORY_COLUMNS.len() {
            return Err(bad(i + 2, format!("expected 14 fields, got {}", cells.len())));
        }
        let mut row = [0.0; 14];
        for (j, cell) in cells.iter().enumerate() {
            row[j] = parse_float(cell).ok_or_else(|| bad(i + 2, format!("bad number `{cell}`")))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Far-field gain sampled around the array, with the client and eavesdropper bearings.
#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternSnapshot {
    pub t: f64,
    pub theta_c: f64,
    pub theta_e: f64,
    pub theta_g: f64,
    pub angles: Vec<f64>,
    pub gains: Vec<f64>,
}

impl BeampatternSnapshot {
    /// Index of the sample closest in angle to `theta`.
    pub fn nearest(&self, theta: f64) -> usize {
        let step = 2.0 * std::f64::consts::PI / self.angles.len() as f64;
        let i = (theta.rem_euclid(2.0 * std::f64::consts::PI) / step).round() as usize;
        i % self.angles.len()
    }

    pub fn to_csv(&self) -> String {
        let (ic, ie) = (self.nearest(self.theta_c), self.nearest(self.theta_e));
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# t={},theta_c={},theta_e={},theta_g={}",
            format_float(self.t),
            format_float(self.theta_c),
            format_float(self.theta_e),
            format_float(wrap_angle(self.theta_g))
        );
        out.push_str("angle_rad,gain,marker\n");
        for (i, (&a, &g)) in self.angles.iter().zip(&self.gains).enumerate() {
            let marker = match (i == ic, i == ie) {
                (true, true) => "client+eavesdropper",
                (true, false) => "client",
                (false, true) => "eavesdropper",
                _ => "",
            };
            let _ = writeln!(out, "{},{},{}", format_float(a), format_float(g), marker);
        }
        out
    }
}

/// Samples the far-field pattern of `beam` at `resolution` uniform angles in [0, 2pi).
pub fn emit_beampattern_snapshot(
    t: f64,
    state: &UavState<f64>,
    beam: &BeamControl<f64>,
    problem: &JammingProblem<f64>,
    resolution: usize,
) -> Result<BeampatternSnapshot> {
    if resolution < 8 {
        return Err(Error::input("snapshot resolution must be at least 8"));
    }
    let ff = problem.far_field(state.position)?;
    let kd = problem.kd();
    let step = 2.0 * std::f64::consts::PI / resolution as f64;
    let angles: Vec<f64> = (0..resolution).map(|i| i as f64 * step).collect();
    let gains = angles
        .iter()
        .map(|&a| far_field_beampattern(&FarFieldGeometry::new(ff.theta_c, a), beam.theta_g, kd))
        .collect();
    Ok(BeampatternSnapshot {
        t,
        theta_c: ff.theta_c,
        theta_e: ff.theta_e,
        theta_g: beam.theta_g,
        angles,
        gains,
    })
}

pub fn write_snapshot(snapshot: &BeampatternSnapshot, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), snapshot.to_csv().as_bytes())
}

/// Headline numbers of a plan or simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub converged: bool,
    pub replans: usize,
    pub failed_replans: usize,
    /// Threshold (dBm, as written) to first crossing time, s.
    pub first_crossing: BTreeMap<String, f64>,
    pub final_power_dbm: f64,
    pub total_cost: f64,
    pub max_control: f64,
    pub max_client_gain: f64,
    pub client_null_ok: bool,
    pub final_position: [f64; 2],
    /// Wall-clock, so kept out of the summary file.
    #[serde(skip)]
    pub per_replan_solve_times: Vec<f64>,
}

pub fn threshold_key(threshold: f64) -> String {
    format!("{threshold}")
}

pub fn write_summary(report: &SummaryReport, path: impl AsRef<Path>) -> Result<()> {
    let text = toml::to_string(report).map_err(|e| Error::input(format!("summary serialization: {e}")))?;
    write_atomic(path.as_ref(), text.as_bytes())
}

pub fn write_timings(report: &SummaryReport, replan_times: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("replan_t,solve_seconds\n");
    for (t, s) in replan_times.iter().zip(&report.per_replan_solve_times) {
        let _ = writeln!(out, "{},{}", format_float(*t), format_float(*s));
    }
    write_atomic(path.as_ref(), out.as_bytes())
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.to_path_buf())
}
