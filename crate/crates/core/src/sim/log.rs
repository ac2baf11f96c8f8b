use crate::beamforming::BeamControl;
use crate::geometry::Point;
use crate::optimizer::UavState;

/// Client gains at or below this are treated as a perfect null (power logged as `-inf`).
pub const NULL_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSample {
    pub t: f64,
    pub state: UavState<f64>,
    pub control: Point<f64>,
    pub beam: BeamControl<f64>,
    pub gain_e: f64,
    pub gain_c: f64,
    pub power_e: f64,
    pub power_c: f64,
}

/// Outcome of one planning solve inside the receding-horizon loop.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplanRecord {
    pub t: f64,
    pub converged: bool,
    pub iterations: usize,
    pub cost: f64,
    pub max_defect: f64,
    pub solve_seconds: f64,
    /// Set when the previous plan kept being executed because this solve failed.
    pub stale: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryLog {
    pub samples: Vec<LogSample>,
    pub replans: Vec<ReplanRecord>,
}

impl TrajectoryLog {
    pub fn max_client_gain(&self) -> f64 {
        self.samples.iter().map(|s| s.gain_c).fold(0.0, f64::max)
    }

    pub fn max_control(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.control.x.abs().max(s.control.y.abs()))
            .fold(0.0, f64::max)
    }

    pub fn all_converged(&self) -> bool {
        self.replans.iter().all(|r| r.converged)
    }

    /// First time the eavesdropper power reaches `threshold`, by linear interpolation between samples.
    pub fn first_crossing(&self, threshold: f64) -> Option<f64> {
        let s = &self.samples;
        if s.first()?.power_e >= threshold {
            return Some(s[0].t);
        }
        for w in s.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.power_e >= threshold {
                if a.power_e == f64::NEG_INFINITY {
                    return Some(b.t);
                }
                let f = (threshold - a.power_e) / (b.power_e - a.power_e);
                return Some(a.t + f * (b.t - a.t));
            }
        }
        None
    }

    pub fn final_power(&self) -> Option<f64> {
        self.samples.last().map(|s| s.power_e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64, p: f64) -> LogSample {
        LogSample {
            t,
            state: UavState::at_rest(Point::zero()),
            control: Point::zero(),
            beam: BeamControl {
                phi1: 0.0,
                phi2: 0.0,
                theta_g: 0.0,
            },
            gain_e: 0.0,
            gain_c: 0.0,
            power_e: p,
            power_c: f64::NEG_INFINITY,
        }
    }

    #[test]
    fn crossing_interpolates() {
        let log = TrajectoryLog {
            samples: vec![
                sample(0.0, f64::NEG_INFINITY),
                sample(1.0, -110.0),
                sample(2.0, -100.0),
                sample(3.0, -80.0),
            ],
            replans: vec![],
        };
        assert_eq!(log.first_crossing(-105.0), Some(1.5));
        assert_eq!(log.first_crossing(-90.0), Some(2.5));
        assert_eq!(log.first_crossing(-200.0), Some(1.0));
        assert_eq!(log.first_crossing(-70.0), None);
    }
}
