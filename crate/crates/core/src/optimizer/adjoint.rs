//! Control law, analytic gradients and costate dynamics.

use super::{CostWeights, Costate, JammingProblem, Regularization, UavState};
use crate::beamforming::{optimal_beampattern, FarFieldGeometry};
use crate::error::Result;
use crate::geometry::{checked_distance, Point};
use crate::propagation::{fspl, jamming_power_dbm};
use crate::scalar::{c, Scalar};

/// Saturated minimizer of the Hamiltonian in `u`, axis by axis.
pub fn control_from_costate<T: Scalar>(costate: &Costate<T>, weights: &CostWeights<T>) -> Point<T> {
    let axis = |xi: T, r: T| {
        let u = -xi / r;
        if u.abs() <= weights.u_bar {
            u
        } else {
            -weights.u_bar * xi.signum()
        }
    };
    Point::new(axis(costate.xi_v.x, weights.r[0]), axis(costate.xi_v.y, weights.r[1]))
}

/// Smooth stand-in for [`control_from_costate`]; tends to it as `sharpness` grows.
///
/// `sharpness` is measured per unit of the normalized control `u / u_bar`.
pub fn smoothed_control<T: Scalar>(costate: &Costate<T>, weights: &CostWeights<T>, sharpness: T) -> Point<T> {
    let softplus = |z: T| {
        let bz = sharpness * z;
        // log(1 + e^bz) / b without overflow
        (bz.max(T::zero()) + (-bz.abs()).exp().ln_1p()) / sharpness
    };
    let axis = |xi: T, r: T| {
        let y = -xi / (r * weights.u_bar);
        let s = y - softplus(y - T::one()) + softplus(-y - T::one());
        weights.u_bar * s
    };
    Point::new(axis(costate.xi_v.x, weights.r[0]), axis(costate.xi_v.y, weights.r[1]))
}

/// Gradient of the path loss L(|p_e - p_g|) with respect to the jammer position.
pub fn grad_fspl<T: Scalar>(uav: Point<T>, eavesdropper: Point<T>, wavenumber: T) -> Result<Point<T>> {
    let d = checked_distance(uav, eavesdropper, "jammer on the eavesdropper")?;
    let d2 = d * d;
    let denom = c::<T>(2.0) * wavenumber * wavenumber * d2 * d2;
    Ok((eavesdropper - uav) * (T::one() / denom))
}

/// Gradient of the below-threshold optimal beampattern with respect to the jammer position.
///
/// Only meaningful where `|mu| < pi / (2 kD)`; above it the optimal gain is the constant 4.
pub fn grad_beampattern<T: Scalar>(
    uav: Point<T>,
    eavesdropper: Point<T>,
    client: Point<T>,
    wavenumber: T,
    separation: T,
) -> Result<Point<T>> {
    let ff = FarFieldGeometry::from_points(uav, client, eavesdropper)?;
    let kd = wavenumber * separation;
    let two_kd = c::<T>(2.0) * kd;
    let factor = two_kd * (two_kd * ff.mu).sin() * (ff.separation() / c(2.0)).cos();
    let dc = client - uav;
    let de = eavesdropper - uav;
    let rc2 = dc.norm_squared();
    let re2 = de.norm_squared();
    // gradient of theta_c - theta_e
    let dsep = Point::new(dc.y / rc2 - de.y / re2, -dc.x / rc2 + de.x / re2);
    Ok(dsep * factor)
}

/// Geometry-dependent pieces of the costate flow at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointTerms<T> {
    /// 10 sigma'(P*) / ln 10.
    pub gamma: T,
    pub grad_l: Point<T>,
    /// Zero whenever `in_case_one` is false.
    pub grad_b: Point<T>,
    pub in_case_one: bool,
    pub b_star: T,
    pub fspl: T,
    /// Optimal received power at the eavesdropper, dBm.
    pub power: T,
}

pub fn adjoint_terms<T: Scalar>(state: &UavState<T>, problem: &JammingProblem<T>) -> Result<AdjointTerms<T>> {
    let p = state.position;
    problem.check_clear(p)?;
    let ff = problem.far_field(p)?;
    let kd = problem.kd();
    let k = problem.radio.wavenumber;
    let b_star = optimal_beampattern(&ff, kd);
    let d = p.distance(problem.eavesdropper);
    let loss = fspl(d, k)?;
    let power = jamming_power_dbm(b_star, d, &problem.radio)?;
    let gamma = c::<T>(10.0) * problem.activation.slope(power) / T::LN_10();
    let in_case_one = ff.below_threshold(kd);
    let grad_b = if in_case_one {
        grad_beampattern(p, problem.eavesdropper, problem.client, k, problem.separation)?
    } else {
        Point::zero()
    };
    Ok(AdjointTerms {
        gamma,
        grad_l: grad_fspl(p, problem.eavesdropper, k)?,
        grad_b,
        in_case_one,
        b_star,
        fspl: loss,
        power,
    })
}

/// gamma (B_p 1{case one} / B*_reg + L_p / L_reg), the gradient of sigma(P*) in `p_g`.
pub fn jamming_gradient<T: Scalar>(terms: &AdjointTerms<T>, reg: &Regularization<T>) -> Point<T> {
    if terms.gamma == T::zero() {
        return Point::zero();
    }
    let mut g = terms.grad_l * (T::one() / terms.fspl.max(reg.l_floor));
    if terms.in_case_one {
        g = g + terms.grad_b * (T::one() / terms.b_star.max(reg.b_floor));
    }
    g * terms.gamma
}

/// Time derivative of the costate.
pub fn costate_flow<T: Scalar>(
    state: &UavState<T>,
    costate: &Costate<T>,
    terms: &AdjointTerms<T>,
    weights: &CostWeights<T>,
    reg: &Regularization<T>,
) -> Costate<T> {
    let xi_p_dot = if weights.a_r == T::zero() {
        Point::zero()
    } else {
        jamming_gradient(terms, reg) * weights.a_r
    };
    let xi_v_dot = -costate.xi_p - weights.q_r.apply(state.velocity);
    Costate::new(xi_p_dot, xi_v_dot)
}

/// Transversality conditions at the final time.
pub fn terminal_conditions<T: Scalar>(
    state_tf: &UavState<T>,
    problem: &JammingProblem<T>,
    weights: &CostWeights<T>,
) -> Result<Costate<T>> {
    let xi_v = weights.q_f.apply(state_tf.velocity);
    if weights.a_f == T::zero() {
        return Ok(Costate::new(Point::zero(), xi_v));
    }
    let terms = adjoint_terms(state_tf, problem)?;
    let xi_p = jamming_gradient(&terms, &problem.regularization) * (-weights.a_f);
    Ok(Costate::new(xi_p, xi_v))
}

/// H = 1/2 u'Ru + 1/2 v'Q_r v - a_r sigma(P*) + xi_p'v + xi_v'u.
pub fn hamiltonian<T: Scalar>(
    state: &UavState<T>,
    costate: &Costate<T>,
    control: Point<T>,
    problem: &JammingProblem<T>,
    weights: &CostWeights<T>,
) -> Result<T> {
    let half = c::<T>(0.5);
    let effort = half * (weights.r[0] * control.x * control.x + weights.r[1] * control.y * control.y);
    let drag = half * weights.q_r.quadratic(state.velocity);
    let reward = if weights.a_r == T::zero() {
        T::zero()
    } else {
        weights.a_r * problem.activation.value(problem.power_at(state.position)?)
    };
    Ok(effort + drag - reward + costate.xi_p.dot(state.velocity) + costate.xi_v.dot(control))
}
