use crate::beamforming::{
    nulling_phase, optimal_orientation, BeamControl, DopplerAccumulator, FarFieldGeometry, MotionSample,
};
use crate::error::Result;
use crate::geometry::{ArrayGeometry, Point};
use crate::optimizer::{JammingProblem, UavState};

/// Beam control for the current instant: optimal orientation, client null, Doppler offset `phi1`.
pub fn apply_beam_control(
    state: &UavState<f64>,
    client: Point<f64>,
    eavesdropper: Point<f64>,
    problem: &JammingProblem<f64>,
    previous_theta_g: Option<f64>,
    phi1: f64,
) -> Result<BeamControl<f64>> {
    let ff = FarFieldGeometry::from_points(state.position, client, eavesdropper)?;
    let theta_g = optimal_orientation(&ff, problem.kd(), previous_theta_g);
    let geom = ArrayGeometry::new(state.position, theta_g, problem.separation, problem.radio.wavenumber)?;
    let phi2 = nulling_phase(phi1, client, &geom)?;
    Ok(BeamControl { phi1, phi2, theta_g })
}

/// Stateful wrapper that carries the Doppler integral and orientation branch between samples.
#[derive(Debug, Clone)]
pub struct BeamController {
    doppler: DopplerAccumulator<f64>,
    previous_theta_g: Option<f64>,
}

impl BeamController {
    pub fn new(wavenumber: f64) -> Self {
        BeamController {
            doppler: DopplerAccumulator::new(wavenumber),
            previous_theta_g: None,
        }
    }

    pub fn update(
        &mut self,
        t: f64,
        state: &UavState<f64>,
        client: Point<f64>,
        eavesdropper: Point<f64>,
        problem: &JammingProblem<f64>,
    ) -> Result<BeamControl<f64>> {
        let sample = MotionSample {
            time: t,
            velocity: state.velocity,
            position: state.position,
        };
        let phi1 = self.doppler.push(&sample, eavesdropper)?;
        let beam = apply_beam_control(state, client, eavesdropper, problem, self.previous_theta_g, phi1)?;
        self.previous_theta_g = Some(beam.theta_g);
        Ok(beam)
    }
}
