//! Forward simulation of the jammer, online beam control and receding-horizon replanning.

mod beam;
mod dynamics;
mod horizon;
mod log;
mod motion;

pub use beam::{apply_beam_control, BeamController};
pub use dynamics::integrate_dynamics;
pub use horizon::{receding_horizon, HorizonSettings, Mission};
pub use log::{LogSample, ReplanRecord, TrajectoryLog, NULL_GAIN};
pub use motion::TargetMotion;
