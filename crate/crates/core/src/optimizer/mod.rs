//! Pontryagin boundary-value problem for the jammer trajectory.
//!
//! With the client nulled and the array oriented optimally, the remaining decision is
//! the airframe acceleration. The necessary conditions couple the double-integrator
//! state with a four-dimensional costate; [`solve_bvp`] solves that system by damped
//! Newton multiple shooting.

mod adjoint;
mod banded;
mod bvp;
mod cost;
mod guess;

pub use adjoint::{
    adjoint_terms, control_from_costate, costate_flow, grad_beampattern, grad_fspl, hamiltonian,
    jamming_gradient, smoothed_control, terminal_conditions, AdjointTerms,
};
pub use banded::BandMatrix;
pub use bvp::{solve_bvp, BvpSolution, SolverOptions};
pub use cost::{evaluate_cost, running_cost};
pub use guess::{midpoint_guess, stationary_guess, InitialGuess};

use crate::beamforming::FarFieldGeometry;
use crate::error::{Error, Result};
use crate::geometry::{checked_distance, Point};
use crate::propagation::{optimal_power_dbm, Activation, RadioParams};
use crate::scalar::{c, Scalar};

/// Position and velocity of the array center.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UavState<T> {
    pub position: Point<T>,
    pub velocity: Point<T>,
}

impl<T: Scalar> UavState<T> {
    pub fn new(position: Point<T>, velocity: Point<T>) -> Self {
        UavState { position, velocity }
    }

    pub fn at_rest(position: Point<T>) -> Self {
        UavState::new(position, Point::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite() && self.velocity.is_finite()
    }
}

/// Multipliers on position and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Costate<T> {
    pub xi_p: Point<T>,
    pub xi_v: Point<T>,
}

impl<T: Scalar> Costate<T> {
    pub fn new(xi_p: Point<T>, xi_v: Point<T>) -> Self {
        Costate { xi_p, xi_v }
    }

    pub fn zero() -> Self {
        Costate::default()
    }
}

/// Symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Scalar> Sym2<T> {
    pub fn new(xx: T, xy: T, yy: T) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub fn scaled_identity(s: T) -> Self {
        Sym2::new(s, T::zero(), s)
    }

    pub fn zero() -> Self {
        Sym2::default()
    }

    pub fn apply(&self, v: Point<T>) -> Point<T> {
        Point::new(self.xx * v.x + self.xy * v.y, self.xy * v.x + self.yy * v.y)
    }

    pub fn quadratic(&self, v: Point<T>) -> T {
        v.dot(self.apply(v))
    }

    pub fn is_psd(&self) -> bool {
        self.xx >= T::zero() && self.yy >= T::zero() && self.xx * self.yy - self.xy * self.xy >= T::zero()
    }
}

/// Cost weights, actuation bound and horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights<T> {
    /// Diagonal of the control penalty R.
    pub r: [T; 2],
    pub q_r: Sym2<T>,
    pub q_f: Sym2<T>,
    pub a_r: T,
    pub a_f: T,
    /// Per-axis acceleration bound, m/s^2.
    pub u_bar: T,
    /// Horizon, seconds.
    pub t_f: T,
}

impl<T: Scalar> CostWeights<T> {
    pub fn validate(&self) -> Result<()> {
        let finite = |x: T| x.is_finite();
        if !(self.r[0] > T::zero() && self.r[1] > T::zero() && finite(self.r[0]) && finite(self.r[1])) {
            return Err(Error::input("control weights r must be positive"));
        }
        if !self.q_r.is_psd() || !self.q_f.is_psd() {
            return Err(Error::input("velocity weights must be positive semidefinite"));
        }
        if !(self.a_r >= T::zero() && self.a_f >= T::zero() && finite(self.a_r) && finite(self.a_f)) {
            return Err(Error::input("jamming weights must be nonnegative"));
        }
        if !(self.u_bar > T::zero() && finite(self.u_bar)) {
            return Err(Error::input("actuation bound must be positive"));
        }
        if !(self.t_f > T::zero() && finite(self.t_f)) {
            return Err(Error::input("horizon must be positive"));
        }
        Ok(())
    }

    /// Weights used in the static jamming experiment, scaled to horizon `t_f`.
    pub fn reference(t_f: T) -> Self {
        let ln10 = T::LN_10();
        let r = c::<T>(200.0) / t_f;
        CostWeights {
            r: [r, r],
            q_r: Sym2::scaled_identity(c::<T>(0.1) / t_f),
            q_f: Sym2::zero(),
            a_r: ln10 / t_f,
            a_f: T::zero(),
            u_bar: c(2.0),
            t_f,
        }
    }
}

/// Floors applied to the B* and L denominators of the costate flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularization<T> {
    pub b_floor: T,
    pub l_floor: T,
}

impl<T: Scalar> Default for Regularization<T> {
    fn default() -> Self {
        Regularization {
            b_floor: c(1e-9),
            l_floor: T::min_positive_value(),
        }
    }
}

/// Frozen targets and radio parameters for one planning problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JammingProblem<T> {
    pub client: Point<T>,
    pub eavesdropper: Point<T>,
    pub radio: RadioParams<T>,
    /// Antenna separation D, meters.
    pub separation: T,
    pub activation: Activation<T>,
    pub regularization: Regularization<T>,
}

impl<T: Scalar> JammingProblem<T> {
    pub fn kd(&self) -> T {
        self.radio.wavenumber * self.separation
    }

    pub fn far_field(&self, uav: Point<T>) -> Result<FarFieldGeometry<T>> {
        FarFieldGeometry::from_points(uav, self.client, self.eavesdropper)
    }

    /// Optimal received power at the eavesdropper from `uav`, dBm.
    pub fn power_at(&self, uav: Point<T>) -> Result<T> {
        let ff = self.far_field(uav)?;
        optimal_power_dbm(self.eavesdropper, uav, &ff, &self.radio, self.kd())
    }

    /// Errors when `uav` sits on a target.
    pub fn check_clear(&self, uav: Point<T>) -> Result<()> {
        checked_distance(uav, self.client, "jammer on the client")?;
        checked_distance(uav, self.eavesdropper, "jammer on the eavesdropper")?;
        Ok(())
    }

    /// Mirror image across the x-axis.
    pub fn mirrored(&self) -> Self {
        JammingProblem {
            client: self.client.mirror_x(),
            eavesdropper: self.eavesdropper.mirror_x(),
            ..*self
        }
    }
}
