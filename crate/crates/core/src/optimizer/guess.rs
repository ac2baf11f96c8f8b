//! Starting trajectories for the boundary-value solver.

use super::{CostWeights, Costate, JammingProblem, UavState};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::{c, Scalar};

/// Sampled trajectory used to seed [`super::solve_bvp`].
#[derive(Debug, Clone, PartialEq)]
pub struct InitialGuess<T> {
    pub times: Vec<T>,
    pub states: Vec<UavState<T>>,
    pub controls: Vec<Point<T>>,
    /// Optional costates; zero when absent.
    pub costates: Option<Vec<Costate<T>>>,
}

impl<T: Scalar> InitialGuess<T> {
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if n < 2 || self.states.len() != n || self.controls.len() != n {
            return Err(Error::input("initial guess needs matching samples, at least two"));
        }
        if let Some(cs) = &self.costates {
            if cs.len() != n {
                return Err(Error::input("initial guess costates length mismatch"));
            }
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::input("initial guess times must be strictly increasing"));
        }
        Ok(())
    }

    pub fn span(&self) -> T {
        self.times[self.times.len() - 1] - self.times[0]
    }

    /// Linear interpolation of every field at `t`, clamped to the sampled span.
    pub fn sample(&self, t: T) -> (UavState<T>, Point<T>, Costate<T>) {
        let n = self.times.len();
        let t = t.max(self.times[0]).min(self.times[n - 1]);
        let i = match self.times.iter().position(|&ti| ti > t) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => n - 2,
        };
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        let lerp = |a: Point<T>, b: Point<T>| a + (b - a) * w;
        let s = UavState::new(
            lerp(self.states[i].position, self.states[i + 1].position),
            lerp(self.states[i].velocity, self.states[i + 1].velocity),
        );
        let u = lerp(self.controls[i], self.controls[i + 1]);
        let cs = match &self.costates {
            Some(cs) => Costate::new(lerp(cs[i].xi_p, cs[i + 1].xi_p), lerp(cs[i].xi_v, cs[i + 1].xi_v)),
            None => Costate::zero(),
        };
        (s, u, cs)
    }
}

fn uniform_mesh<T: Scalar>(t_f: T, nodes: usize) -> Vec<T> {
    let last = T::lit((nodes - 1) as f64);
    (0..nodes).map(|i| t_f * T::lit(i as f64) / last).collect()
}

/// Holds `initial` over `[0, t_f]` with zero control.
pub fn stationary_guess<T: Scalar>(initial: &UavState<T>, t_f: T, nodes: usize) -> InitialGuess<T> {
    let nodes = nodes.max(2);
    let times = uniform_mesh(t_f, nodes);
    let states = times
        .iter()
        .map(|&t| UavState::new(initial.position + initial.velocity * t, initial.velocity))
        .collect();
    InitialGuess {
        times,
        states,
        controls: vec![Point::zero(); nodes],
        costates: None,
    }
}

/// Minimum-jerk path from the initial position to the client-eavesdropper midpoint, zero costates.
///
/// The path is bowed sideways by a quarter of its length so it does not run along the
/// client-eavesdropper line (where the jammer would cross the client). The bow goes to the
/// side of that line the jammer starts on; with all three points collinear it bows clockwise
/// of the direction of travel.
pub fn midpoint_guess<T: Scalar>(
    problem: &JammingProblem<T>,
    initial: &UavState<T>,
    weights: &CostWeights<T>,
    nodes: usize,
) -> InitialGuess<T> {
    let nodes = nodes.max(2);
    let t_f = weights.t_f;
    let p0 = initial.position;
    let mid = (problem.client + problem.eavesdropper) * c(0.5);
    let travel = mid - p0;
    let len = travel.norm();
    if !(len > T::zero()) {
        return stationary_guess(&UavState::at_rest(p0), t_f, nodes);
    }

    let clockwise = Point::new(travel.y, -travel.x) * (T::one() / len);
    let line = problem.eavesdropper - problem.client;
    let side = line.cross(p0 - problem.client);
    let tiny = c::<T>(1e-9) * line.norm() * (p0 - problem.client).norm();
    let normal = if side.abs() > tiny {
        // unit normal of the target line pointing at the jammer's side
        let n = Point::new(-line.y, line.x) * side.signum();
        if clockwise.dot(n) >= T::zero() {
            clockwise
        } else {
            -clockwise
        }
    } else {
        clockwise
    };
    let amp = len * c(0.25);

    let times = uniform_mesh(t_f, nodes);
    let mut states = Vec::with_capacity(nodes);
    let mut controls = Vec::with_capacity(nodes);
    for &t in &times {
        let s = t / t_f;
        let s2 = s * s;
        let s3 = s2 * s;
        // minimum-jerk blend and its derivatives in s
        let m = s3 * (c::<T>(10.0) - c::<T>(15.0) * s + c::<T>(6.0) * s2);
        let dm = c::<T>(30.0) * s2 * (T::one() - s) * (T::one() - s);
        let ddm = c::<T>(60.0) * s * (T::one() - s) * (T::one() - c::<T>(2.0) * s);
        // bow 64 w^3 with w = s(1 - s), peak 1 at s = 1/2
        let w = s * (T::one() - s);
        let dw = T::one() - c::<T>(2.0) * s;
        let b = c::<T>(64.0) * w * w * w;
        let db = c::<T>(192.0) * w * w * dw;
        let ddb = c::<T>(384.0) * w * dw * dw - c::<T>(384.0) * w * w;

        let pos = p0 + travel * m + normal * (amp * b);
        let vel = (travel * dm + normal * (amp * db)) * (T::one() / t_f);
        let acc = (travel * ddm + normal * (amp * ddb)) * (T::one() / (t_f * t_f));
        let clamp = |a: T| a.max(-weights.u_bar).min(weights.u_bar);
        states.push(UavState::new(pos, vel));
        controls.push(Point::new(clamp(acc.x), clamp(acc.y)));
    }
    InitialGuess {
        times,
        states,
        controls,
        costates: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::Regularization;
    use crate::propagation::{Activation, RadioParams};

    fn problem(client: Point<f64>, eve: Point<f64>) -> JammingProblem<f64> {
        JammingProblem {
            client,
            eavesdropper: eve,
            radio: RadioParams::new(600.0, 33.0).unwrap(),
            separation: 0.095,
            activation: Activation::default(),
            regularization: Regularization::default(),
        }
    }

    #[test]
    fn guess_reaches_midpoint_and_avoids_client() {
        let pb = problem(Point::new(3000.0, 3000.0), Point::new(6000.0, 6000.0));
        let w = CostWeights::reference(300.0);
        let g = midpoint_guess(&pb, &UavState::at_rest(Point::zero()), &w, 201);
        g.validate().unwrap();
        assert_eq!(g.states[0].position, Point::new(0.0, 0.0));
        let end = g.states[200];
        assert!(end.position.distance(Point::new(4500.0, 4500.0)) < 1e-6);
        assert!(end.velocity.norm() < 1e-9);
        let closest = g
            .states
            .iter()
            .map(|s| s.position.distance(pb.client))
            .fold(f64::MAX, f64::min);
        assert!(closest > 500.0, "{closest}");
        assert!(g.controls.iter().all(|u| u.x.abs() <= 2.0 && u.y.abs() <= 2.0));
        // collinear start bows clockwise of travel: below the diagonal
        assert!(g.states[100].position.y < g.states[100].position.x);
    }

    #[test]
    fn bow_follows_reflection() {
        let pb = problem(Point::new(3000.0, 1000.0), Point::new(6000.0, 2500.0));
        let start = UavState::at_rest(Point::new(0.0, 800.0));
        let w = CostWeights::reference(300.0);
        let g = midpoint_guess(&pb, &start, &w, 51);
        let m = midpoint_guess(&pb.mirrored(), &UavState::at_rest(start.position.mirror_x()), &w, 51);
        for (a, b) in g.states.iter().zip(&m.states) {
            assert!(a.position.mirror_x().distance(b.position) < 1e-9);
        }
    }

    #[test]
    fn sample_interpolates() {
        let g = stationary_guess(&UavState::new(Point::zero(), Point::new(1.0f64, 0.0)), 10.0, 11);
        let (s, _, cs) = g.sample(2.5);
        assert!((s.position.x - 2.5).abs() < 1e-12);
        assert_eq!(cs, Costate::zero());
        let (s, _, _) = g.sample(50.0);
        assert!((s.position.x - 10.0).abs() < 1e-12);
    }
}
