use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// How a ground target moves. Positions are defined for every `t >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetMotion {
    Static {
        initial: [f64; 2],
    },
    ConstantVelocity {
        initial: [f64; 2],
        velocity: [f64; 2],
    },
    /// Piecewise-linear through timed waypoints `[t, x, y]`, starting from `initial` at t = 0
    /// and holding the last waypoint afterwards.
    WaypointSequence {
        initial: [f64; 2],
        waypoints: Vec<[f64; 3]>,
    },
}

impl TargetMotion {
    pub fn fixed(p: Point<f64>) -> Self {
        TargetMotion::Static { initial: [p.x, p.y] }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            TargetMotion::Static { initial } => {
                if !finite(initial) {
                    return Err(Error::input("target position must be finite"));
                }
            }
            TargetMotion::ConstantVelocity { initial, velocity } => {
                if !finite(initial) || !finite(velocity) {
                    return Err(Error::input("target position and velocity must be finite"));
                }
            }
            TargetMotion::WaypointSequence { initial, waypoints } => {
                if !finite(initial) || waypoints.iter().any(|w| !finite(w)) {
                    return Err(Error::input("waypoints must be finite"));
                }
                let mut last = 0.0;
                for w in waypoints {
                    if !(w[0] > last) {
                        return Err(Error::input("waypoint times must be positive and increasing"));
                    }
                    last = w[0];
                }
            }
        }
        Ok(())
    }

    pub fn position_at(&self, t: f64) -> Point<f64> {
        match self {
            TargetMotion::Static { initial } => Point::new(initial[0], initial[1]),
            TargetMotion::ConstantVelocity { initial, velocity } => {
                Point::new(initial[0] + velocity[0] * t, initial[1] + velocity[1] * t)
            }
            TargetMotion::WaypointSequence { initial, waypoints } => {
                let (mut t0, mut p0) = (0.0, Point::new(initial[0], initial[1]));
                for w in waypoints {
                    let p1 = Point::new(w[1], w[2]);
                    if t <= w[0] {
                        let s = ((t - t0) / (w[0] - t0)).max(0.0);
                        return p0 + (p1 - p0) * s;
                    }
                    t0 = w[0];
                    p0 = p1;
                }
                p0
            }
        }
    }

    pub fn is_static(&self) -> bool {
        match self {
            TargetMotion::Static { .. } => true,
            TargetMotion::ConstantVelocity { velocity, .. } => velocity[0] == 0.0 && velocity[1] == 0.0,
            TargetMotion::WaypointSequence { initial, waypoints } => {
                waypoints.iter().all(|w| w[1] == initial[0] && w[2] == initial[1])
            }
        }
    }

    pub fn mirrored(&self) -> Self {
        match self {
            TargetMotion::Static { initial } => TargetMotion::Static {
                initial: [initial[0], -initial[1]],
            },
            TargetMotion::ConstantVelocity { initial, velocity } => TargetMotion::ConstantVelocity {
                initial: [initial[0], -initial[1]],
                velocity: [velocity[0], -velocity[1]],
            },
            TargetMotion::WaypointSequence { initial, waypoints } => TargetMotion::WaypointSequence {
                initial: [initial[0], -initial[1]],
                waypoints: waypoints.iter().map(|w| [w[0], w[1], -w[2]]).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn motion_kinds() {
        let s = TargetMotion::Static { initial: [1.0, 2.0] };
        assert_eq!(s.position_at(100.0), Point::new(1.0, 2.0));
        assert!(s.is_static());

        let cv = TargetMotion::ConstantVelocity {
            initial: [6000.0, 0.0],
            velocity: [0.0, 5.0],
        };
        assert_eq!(cv.position_at(20.0), Point::new(6000.0, 100.0));
        assert!(!cv.is_static());

        let wp = TargetMotion::WaypointSequence {
            initial: [0.0, 0.0],
            waypoints: vec![[10.0, 10.0, 0.0], [20.0, 10.0, 20.0]],
        };
        wp.validate().unwrap();
        assert_eq!(wp.position_at(5.0), Point::new(5.0, 0.0));
        assert_eq!(wp.position_at(15.0), Point::new(10.0, 10.0));
        assert_eq!(wp.position_at(99.0), Point::new(10.0, 20.0));
    }

    #[test]
    fn waypoint_times_must_increase() {
        let wp = TargetMotion::WaypointSequence {
            initial: [0.0, 0.0],
            waypoints: vec![[10.0, 1.0, 0.0], [10.0, 2.0, 0.0]],
        };
        assert!(wp.validate().is_err());
    }

    #[test]
    fn parses_tagged_toml() {
        let m: TargetMotion = toml::from_str("kind = \"constant-velocity\"\ninitial = [1.0, 2.0]\nvelocity = [0.0, 5.0]").unwrap();
        assert_eq!(
            m,
            TargetMotion::ConstantVelocity {
                initial: [1.0, 2.0],
                velocity: [0.0, 5.0]
            }
        );
        let bad = toml::from_str::<TargetMotion>("kind = \"static\"\ninitial = [1.0, 2.0]\nspeed = 3.0");
        assert!(bad.is_err());
    }
}
