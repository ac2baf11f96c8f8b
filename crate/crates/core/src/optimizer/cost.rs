use super::{CostWeights, JammingProblem, UavState};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{c, Scalar};

/// 1/2 u'Ru + 1/2 v'Q_r v - a_r sigma(P*).
pub fn running_cost<T: Scalar>(
    state: &UavState<T>,
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
    Ok(effort + drag - reward)
}

/// Trapezoidal cost of a sampled trajectory plus the terminal terms.
pub fn evaluate_cost<T: Scalar>(
    times: &[T],
    states: &[UavState<T>],
    controls: &[Point<T>],
    problem: &JammingProblem<T>,
    weights: &CostWeights<T>,
) -> Result<T> {
    let n = times.len();
    if n < 2 || states.len() != n || controls.len() != n {
        return Err(Error::input("trajectory needs at least two nodes with matching lengths"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::input("trajectory times must be strictly increasing"));
    }
    let span_tol = c::<T>(1e-9) * weights.t_f;
    if times[0].abs() > span_tol || (times[n - 1] - weights.t_f).abs() > span_tol {
        return Err(Error::input("trajectory must cover [0, t_f]"));
    }
    let bound = weights.u_bar * (T::one() + c(1e-12));
    if let Some(i) = controls.iter().position(|u| u.x.abs() > bound || u.y.abs() > bound) {
        return Err(Error::input(format!(
            "control {:?} at node {i} exceeds the actuation bound {}",
            controls[i], weights.u_bar
        )));
    }

    let mut prev = running_cost(&states[0], controls[0], problem, weights)?;
    let mut total = T::zero();
    for i in 1..n {
        let cur = running_cost(&states[i], controls[i], problem, weights)?;
        total += (times[i] - times[i - 1]) * (prev + cur) / c(2.0);
        prev = cur;
    }

    let last = &states[n - 1];
    total += c::<T>(0.5) * weights.q_f.quadratic(last.velocity);
    if weights.a_f != T::zero() {
        total -= weights.a_f * problem.activation.value(problem.power_at(last.position)?);
    }
    Ok(total)
}
