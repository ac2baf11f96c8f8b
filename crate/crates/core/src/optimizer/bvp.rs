//! Damped Newton multiple shooting for the state/costate boundary-value problem.
//!
//! Every mesh interval is one shooting segment advanced by a single RK4 step of the
//! coupled eight-dimensional system. Unknowns and defects are scaled per component
//! (positions by a length scale, time by the horizon) before the banded Newton solve.
//!
//! Newton needs a reasonable start. Before it runs, a projected, R-preconditioned
//! gradient descent on the sampled controls (gradients from the same costate
//! equations) moves the seed trajectory into the basin of a local minimizer. Newton
//! then runs through a schedule of smoothed saturation laws and finishes on the exact
//! control law, where the convergence flag is decided.

use super::adjoint::{adjoint_terms, control_from_costate, costate_flow, smoothed_control, terminal_conditions};
use super::banded::BandMatrix;
use super::cost::evaluate_cost;
use super::guess::InitialGuess;
use super::{CostWeights, Costate, JammingProblem, UavState};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::ode::rk4_step;
use crate::scalar::{c, Scalar};

/// Knobs for [`solve_bvp`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions<T> {
    /// Bound on every scaled defect for convergence.
    pub tolerance: T,
    pub max_iterations: usize,
    /// Initial uniform mesh size.
    pub nodes: usize,
    /// Intervals whose step-doubling error exceeds `refine_factor * tolerance` are bisected.
    pub refine_factor: T,
    pub max_refinements: usize,
    pub max_nodes: usize,
    /// Smoothed-saturation sharpness schedule run before the exact law.
    pub sharpness: Vec<T>,
    /// Position scale, meters.
    pub length_scale: T,
    pub descent_iterations: usize,
    /// Relative step of the finite-difference Jacobian, in scaled units.
    pub fd_step: T,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tolerance: c(1e-6),
            max_iterations: 200,
            nodes: 201,
            refine_factor: c(10.0),
            max_refinements: 3,
            max_nodes: 2001,
            sharpness: vec![c(30.0), c(300.0), c(3000.0)],
            length_scale: c(1e3),
            descent_iterations: 400,
            fd_step: c(1e-7),
        }
    }
}

/// Solved (or best-effort) trajectory with costates and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BvpSolution<T> {
    pub mesh: Vec<T>,
    pub states: Vec<UavState<T>>,
    pub costates: Vec<Costate<T>>,
    /// Costate time derivatives at the nodes.
    pub costate_rates: Vec<Costate<T>>,
    pub controls: Vec<Point<T>>,
    pub cost: T,
    pub max_defect: T,
    pub converged: bool,
    pub iterations: usize,
    pub weights: CostWeights<T>,
}

type Node<T> = [T; 8];

fn pack<T: Scalar>(s: &UavState<T>, cs: &Costate<T>) -> Node<T> {
    [
        s.position.x,
        s.position.y,
        s.velocity.x,
        s.velocity.y,
        cs.xi_p.x,
        cs.xi_p.y,
        cs.xi_v.x,
        cs.xi_v.y,
    ]
}

fn unpack<T: Scalar>(z: &Node<T>) -> (UavState<T>, Costate<T>) {
    (
        UavState::new(Point::new(z[0], z[1]), Point::new(z[2], z[3])),
        Costate::new(Point::new(z[4], z[5]), Point::new(z[6], z[7])),
    )
}

fn hermite<T: Scalar>(y0: T, d0: T, y1: T, d1: T, h: T, s: T) -> T {
    let s2 = s * s;
    let s3 = s2 * s;
    let two = c::<T>(2.0);
    let three = c::<T>(3.0);
    (two * s3 - three * s2 + T::one()) * y0
        + (s3 - two * s2 + s) * h * d0
        + (three * s2 - two * s3) * y1
        + (s3 - s2) * h * d1
}

fn hermite_point<T: Scalar>(y0: Point<T>, d0: Point<T>, y1: Point<T>, d1: Point<T>, h: T, s: T) -> Point<T> {
    Point::new(hermite(y0.x, d0.x, y1.x, d1.x, h, s), hermite(y0.y, d0.y, y1.y, d1.y, h, s))
}

fn segment<T: Scalar>(mesh: &[T], t: T) -> (usize, T) {
    let n = mesh.len();
    let i = mesh.partition_point(|&m| m <= t).clamp(1, n - 1) - 1;
    let h = mesh[i + 1] - mesh[i];
    let s = ((t - mesh[i]) / h).max(T::zero()).min(T::one());
    (i, s)
}

impl<T: Scalar> BvpSolution<T> {
    pub fn horizon(&self) -> T {
        self.mesh[self.mesh.len() - 1]
    }

    /// Cubic Hermite state between nodes, clamped to the horizon.
    pub fn state_at(&self, t: T) -> UavState<T> {
        let (i, s) = segment(&self.mesh, t);
        let h = self.mesh[i + 1] - self.mesh[i];
        let (a, b) = (&self.states[i], &self.states[i + 1]);
        UavState::new(
            hermite_point(a.position, a.velocity, b.position, b.velocity, h, s),
            hermite_point(a.velocity, self.controls[i], b.velocity, self.controls[i + 1], h, s),
        )
    }

    /// Cubic Hermite costate between nodes, clamped to the horizon.
    pub fn costate_at(&self, t: T) -> Costate<T> {
        let (i, s) = segment(&self.mesh, t);
        let h = self.mesh[i + 1] - self.mesh[i];
        let (a, b) = (&self.costates[i], &self.costates[i + 1]);
        let (da, db) = (&self.costate_rates[i], &self.costate_rates[i + 1]);
        Costate::new(
            hermite_point(a.xi_p, da.xi_p, b.xi_p, db.xi_p, h, s),
            hermite_point(a.xi_v, da.xi_v, b.xi_v, db.xi_v, h, s),
        )
    }

    /// Exact control law applied to the interpolated costate.
    pub fn control_at(&self, t: T) -> Point<T> {
        control_from_costate(&self.costate_at(t), &self.weights)
    }

    /// Seed for a later solve: this plan advanced by `shift`, extended by holding its final node.
    pub fn shifted(&self, shift: T, horizon: T, nodes: usize) -> InitialGuess<T> {
        let nodes = nodes.max(2);
        let end = self.horizon();
        let last = self.mesh.len() - 1;
        let mut guess = InitialGuess {
            times: Vec::with_capacity(nodes),
            states: Vec::with_capacity(nodes),
            controls: Vec::with_capacity(nodes),
            costates: Some(Vec::with_capacity(nodes)),
        };
        for i in 0..nodes {
            let tau = horizon * T::lit(i as f64) / T::lit((nodes - 1) as f64);
            let t = tau + shift;
            let (s, cs) = if t <= end {
                (self.state_at(t), self.costate_at(t))
            } else {
                (self.states[last], self.costates[last])
            };
            guess.times.push(tau);
            guess.states.push(s);
            guess.controls.push(control_from_costate(&cs, &self.weights));
            guess.costates.as_mut().expect("set above").push(cs);
        }
        guess
    }
}

#[derive(Debug, Clone, Copy)]
enum Law<T> {
    Exact,
    Smooth(T),
}

struct Shooting<'a, T> {
    problem: &'a JammingProblem<T>,
    weights: &'a CostWeights<T>,
    x0: UavState<T>,
    scale: Node<T>,
    law: Law<T>,
    fd_step: T,
}

impl<'a, T: Scalar> Shooting<'a, T> {
    fn control(&self, cs: &Costate<T>) -> Point<T> {
        match self.law {
            Law::Exact => control_from_costate(cs, self.weights),
            Law::Smooth(s) => smoothed_control(cs, self.weights, s),
        }
    }

    fn costate_rate(&self, s: &UavState<T>, cs: &Costate<T>) -> Result<Costate<T>> {
        if self.weights.a_r == T::zero() {
            return Ok(Costate::new(-Point::zero(), -cs.xi_p - self.weights.q_r.apply(s.velocity)));
        }
        let terms = adjoint_terms(s, self.problem)?;
        Ok(costate_flow(s, cs, &terms, self.weights, &self.problem.regularization))
    }

    fn rhs(&self, z: &Node<T>) -> Result<Node<T>> {
        let (s, cs) = unpack(z);
        let u = self.control(&cs);
        let f = self.costate_rate(&s, &cs)?;
        Ok([
            s.velocity.x,
            s.velocity.y,
            u.x,
            u.y,
            f.xi_p.x,
            f.xi_p.y,
            f.xi_v.x,
            f.xi_v.y,
        ])
    }

    fn step(&self, z: &Node<T>, h: T) -> Result<Node<T>> {
        rk4_step(&mut |_t, y: &Node<T>| self.rhs(y), T::zero(), z, h)
    }

    fn terminal_residual(&self, z: &Node<T>) -> Result<[T; 4]> {
        let (s, cs) = unpack(z);
        let target = terminal_conditions(&s, self.problem, self.weights)?;
        let sc = &self.scale;
        Ok([
            (cs.xi_p.x - target.xi_p.x) / sc[4],
            (cs.xi_p.y - target.xi_p.y) / sc[5],
            (cs.xi_v.x - target.xi_v.x) / sc[6],
            (cs.xi_v.y - target.xi_v.y) / sc[7],
        ])
    }

    fn residual(&self, mesh: &[T], z: &[Node<T>]) -> Result<Vec<T>> {
        let n = mesh.len();
        let sc = &self.scale;
        let mut r = Vec::with_capacity(8 * n);
        let x0 = pack(&self.x0, &Costate::zero());
        for k in 0..4 {
            r.push((z[0][k] - x0[k]) / sc[k]);
        }
        for i in 0..n - 1 {
            let next = self.step(&z[i], mesh[i + 1] - mesh[i])?;
            for k in 0..8 {
                r.push((z[i + 1][k] - next[k]) / sc[k]);
            }
        }
        r.extend(self.terminal_residual(&z[n - 1])?);
        Ok(r)
    }

    fn jacobian(&self, mesh: &[T], z: &[Node<T>]) -> Result<BandMatrix<T>> {
        let n = mesh.len();
        let sc = &self.scale;
        let mut jac = BandMatrix::zeros(8 * n, 11, 11);
        for k in 0..4 {
            jac.set(k, k, T::one());
        }
        for i in 0..n - 1 {
            let h = mesh[i + 1] - mesh[i];
            let base = self.step(&z[i], h)?;
            let row0 = 4 + 8 * i;
            for j in 0..8 {
                let mut zp = z[i];
                zp[j] += self.fd_step * sc[j];
                let pert = self.step(&zp, h)?;
                for k in 0..8 {
                    let d = (pert[k] - base[k]) / (self.fd_step * sc[k]);
                    jac.set(row0 + k, 8 * i + j, -d);
                }
            }
            for k in 0..8 {
                jac.set(row0 + k, 8 * (i + 1) + k, T::one());
            }
        }
        let last = &z[n - 1];
        let base = self.terminal_residual(last)?;
        let row0 = 4 + 8 * (n - 1);
        for j in 0..8 {
            let mut zp = *last;
            zp[j] += self.fd_step * sc[j];
            let pert = self.terminal_residual(&zp)?;
            for k in 0..4 {
                jac.set(row0 + k, 8 * (n - 1) + j, (pert[k] - base[k]) / self.fd_step);
            }
        }
        Ok(jac)
    }

    /// Damped Newton. Returns the final max-norm defect; `z` holds the best iterate.
    fn newton(&self, mesh: &[T], z: &mut [Node<T>], tol: T, budget: usize, used: &mut usize) -> Result<T> {
        let norm = |r: &[T]| r.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let merit = |r: &[T]| r.iter().fold(T::zero(), |m, v| m + *v * *v);
        let mut r = self.residual(mesh, z)?;
        for _ in 0..budget {
            if norm(&r) <= tol {
                break;
            }
            let jac = match self.jacobian(mesh, z) {
                Ok(j) => j,
                Err(_) => break,
            };
            let mut dz: Vec<T> = r.iter().map(|v| -*v).collect();
            if jac.solve(&mut dz).is_none() {
                break;
            }
            *used += 1;
            let m0 = merit(&r);
            let mut lambda = T::one();
            let mut accepted = None;
            while lambda >= c(1.0 / 1024.0) {
                let trial: Vec<Node<T>> = z
                    .iter()
                    .enumerate()
                    .map(|(i, zi)| {
                        let mut t = *zi;
                        for k in 0..8 {
                            t[k] += lambda * dz[8 * i + k] * self.scale[k];
                        }
                        t
                    })
                    .collect();
                if let Ok(rt) = self.residual(mesh, &trial) {
                    if merit(&rt) <= m0 * (T::one() - c::<T>(2e-4) * lambda) {
                        accepted = Some((trial, rt));
                        break;
                    }
                }
                lambda = lambda / c(2.0);
            }
            match accepted {
                Some((trial, rt)) => {
                    z.copy_from_slice(&trial);
                    r = rt;
                }
                None => break,
            }
        }
        Ok(norm(&r))
    }

    /// Step-doubling error estimate of one RK4 interval, in scaled units.
    fn interval_error(&self, z: &Node<T>, h: T) -> Result<T> {
        let full = self.step(z, h)?;
        let half = h / c(2.0);
        let two = self.step(&self.step(z, half)?, half)?;
        let mut e = T::zero();
        for k in 0..8 {
            e = e.max((full[k] - two[k]).abs() / self.scale[k]);
        }
        Ok(e * c(16.0 / 15.0))
    }
}

/// Controls sampled on the mesh, integrated with linear interpolation inside each interval.
fn forward<T: Scalar>(mesh: &[T], x0: &UavState<T>, controls: &[Point<T>]) -> Vec<UavState<T>> {
    let mut out = Vec::with_capacity(mesh.len());
    let mut y = [x0.position.x, x0.position.y, x0.velocity.x, x0.velocity.y];
    out.push(*x0);
    for i in 0..mesh.len() - 1 {
        let (t0, h) = (mesh[i], mesh[i + 1] - mesh[i]);
        let (u0, u1) = (controls[i], controls[i + 1]);
        let mut f = |t: T, s: &[T; 4]| {
            let w = (t - t0) / h;
            let u = u0 + (u1 - u0) * w;
            Ok::<_, Error>([s[2], s[3], u.x, u.y])
        };
        y = rk4_step(&mut f, t0, &y, h).expect("double integrator is infallible");
        out.push(UavState::new(Point::new(y[0], y[1]), Point::new(y[2], y[3])));
    }
    out
}

/// Costates integrated backward along a sampled trajectory.
fn backward<T: Scalar>(
    mesh: &[T],
    states: &[UavState<T>],
    controls: &[Point<T>],
    shoot: &Shooting<'_, T>,
) -> Result<Vec<Costate<T>>> {
    let n = mesh.len();
    let mut out = vec![Costate::zero(); n];
    out[n - 1] = terminal_conditions(&states[n - 1], shoot.problem, shoot.weights)?;
    for i in (0..n - 1).rev() {
        let (t0, h) = (mesh[i], mesh[i + 1] - mesh[i]);
        let (a, b) = (&states[i], &states[i + 1]);
        let state_at = |t: T| {
            let s = (t - t0) / h;
            UavState::new(
                hermite_point(a.position, a.velocity, b.position, b.velocity, h, s),
                hermite_point(a.velocity, controls[i], b.velocity, controls[i + 1], h, s),
            )
        };
        let mut f = |t: T, y: &[T; 4]| {
            let cs = Costate::new(Point::new(y[0], y[1]), Point::new(y[2], y[3]));
            let d = shoot.costate_rate(&state_at(t), &cs)?;
            Ok::<_, Error>([d.xi_p.x, d.xi_p.y, d.xi_v.x, d.xi_v.y])
        };
        let cs = out[i + 1];
        let y = [cs.xi_p.x, cs.xi_p.y, cs.xi_v.x, cs.xi_v.y];
        let y = rk4_step(&mut f, mesh[i + 1], &y, -h)?;
        out[i] = Costate::new(Point::new(y[0], y[1]), Point::new(y[2], y[3]));
    }
    Ok(out)
}

/// Projected descent on the sampled controls toward the Pontryagin fixed point.
fn descend<T: Scalar>(
    mesh: &[T],
    shoot: &Shooting<'_, T>,
    mut controls: Vec<Point<T>>,
    iterations: usize,
) -> (Vec<UavState<T>>, Vec<Costate<T>>, Vec<Point<T>>) {
    let cost_of = |u: &[Point<T>]| {
        let xs = forward(mesh, &shoot.x0, u);
        let j = evaluate_cost(mesh, &xs, u, shoot.problem, shoot.weights).unwrap_or(T::infinity());
        (xs, j)
    };
    let (mut states, mut cost) = cost_of(&controls);
    let mut costates = backward(mesh, &states, &controls, shoot).ok();
    let mut alpha = T::one();
    for _ in 0..iterations {
        let cs = match &costates {
            Some(cs) => cs,
            None => break,
        };
        let target: Vec<Point<T>> = cs.iter().map(|c| control_from_costate(c, shoot.weights)).collect();
        let gap = target
            .iter()
            .zip(&controls)
            .fold(T::zero(), |m, (a, b)| m.max((a.x - b.x).abs()).max((a.y - b.y).abs()));
        if gap <= c::<T>(1e-7) * shoot.weights.u_bar {
            break;
        }
        let mut improved = false;
        while alpha >= c(1e-6) {
            let trial: Vec<Point<T>> = controls
                .iter()
                .zip(&target)
                .map(|(&u, &g)| u + (g - u) * alpha)
                .collect();
            let (xs, j) = cost_of(&trial);
            if j < cost {
                if let Ok(next) = backward(mesh, &xs, &trial, shoot) {
                    controls = trial;
                    states = xs;
                    cost = j;
                    costates = Some(next);
                    improved = true;
                    alpha = (alpha * c(1.5)).min(T::one());
                    break;
                }
            }
            alpha = alpha / c(2.0);
        }
        if !improved {
            break;
        }
    }
    let costates = costates.unwrap_or_else(|| vec![Costate::zero(); mesh.len()]);
    (states, costates, controls)
}

/// Solves the necessary conditions for the minimum-cost jammer trajectory from `initial`.
///
/// Non-convergence is not an error: the best iterate is returned with `converged = false`.
pub fn solve_bvp<T: Scalar>(
    problem: &JammingProblem<T>,
    weights: &CostWeights<T>,
    initial: &UavState<T>,
    guess: &InitialGuess<T>,
    options: &SolverOptions<T>,
) -> Result<BvpSolution<T>> {
    weights.validate()?;
    guess.validate()?;
    if !initial.is_finite() {
        return Err(Error::input("initial state must be finite"));
    }
    problem.check_clear(initial.position)?;
    if options.nodes < 3 {
        return Err(Error::input("solver needs at least three mesh nodes"));
    }

    let t_f = weights.t_f;
    let ls = options.length_scale;
    let r_mean = (weights.r[0] + weights.r[1]) / c(2.0);
    let xi_v = r_mean * weights.u_bar;
    let scale = [ls, ls, ls / t_f, ls / t_f, xi_v / t_f, xi_v / t_f, xi_v, xi_v];
    let mut shoot = Shooting {
        problem,
        weights,
        x0: *initial,
        scale,
        law: Law::Exact,
        fd_step: options.fd_step,
    };

    let n0 = options.nodes;
    let mut mesh: Vec<T> = (0..n0)
        .map(|i| t_f * T::lit(i as f64) / T::lit((n0 - 1) as f64))
        .collect();
    let t0 = guess.times[0];
    let span = guess.span();
    let seed: Vec<_> = mesh.iter().map(|&t| guess.sample(t0 + t / t_f * span)).collect();
    let mut seed_controls: Vec<Point<T>> = seed.iter().map(|(_, u, _)| *u).collect();
    if guess.costates.is_some() {
        seed_controls = seed.iter().map(|(_, _, cs)| control_from_costate(cs, weights)).collect();
    }

    let (states, costates, _) = descend(&mesh, &shoot, seed_controls, options.descent_iterations);
    let mut z: Vec<Node<T>> = states.iter().zip(&costates).map(|(s, cs)| pack(s, cs)).collect();

    let tol = options.tolerance;
    let mut used = 0usize;
    for &s in &options.sharpness {
        if used >= options.max_iterations {
            break;
        }
        shoot.law = Law::Smooth(s);
        let mut trial = z.clone();
        let budget = (options.max_iterations - used) / 2;
        if shoot.newton(&mesh, &mut trial, tol, budget, &mut used).is_ok() {
            z = trial;
        }
    }
    shoot.law = Law::Exact;
    let mut defect = shoot.newton(&mesh, &mut z, tol, options.max_iterations.saturating_sub(used), &mut used)?;

    for _ in 0..options.max_refinements {
        if defect > tol || mesh.len() >= options.max_nodes {
            break;
        }
        let mut split = Vec::new();
        for i in 0..mesh.len() - 1 {
            if shoot.interval_error(&z[i], mesh[i + 1] - mesh[i])? > options.refine_factor * tol {
                split.push(i);
            }
        }
        if split.is_empty() {
            break;
        }
        let room = options.max_nodes - mesh.len();
        split.truncate(room);
        let mut new_mesh = Vec::with_capacity(mesh.len() + split.len());
        let mut new_z = Vec::with_capacity(mesh.len() + split.len());
        let mut it = split.iter().peekable();
        for i in 0..mesh.len() {
            new_mesh.push(mesh[i]);
            new_z.push(z[i]);
            if it.peek() == Some(&&i) {
                it.next();
                let h = (mesh[i + 1] - mesh[i]) / c(2.0);
                new_mesh.push(mesh[i] + h);
                new_z.push(shoot.step(&z[i], h)?);
            }
        }
        mesh = new_mesh;
        z = new_z;
        let budget = options.max_iterations.saturating_sub(used).max(10);
        defect = shoot.newton(&mesh, &mut z, tol, budget, &mut used)?;
    }

    // the initial condition holds to round-off; make it exact
    let x0 = pack(initial, &Costate::zero());
    z[0][..4].copy_from_slice(&x0[..4]);
    let mut states = Vec::with_capacity(z.len());
    let mut costates = Vec::with_capacity(z.len());
    let mut rates = Vec::with_capacity(z.len());
    for node in &z {
        let (s, cs) = unpack(node);
        rates.push(shoot.costate_rate(&s, &cs)?);
        states.push(s);
        costates.push(cs);
    }
    let controls: Vec<Point<T>> = costates.iter().map(|cs| control_from_costate(cs, weights)).collect();
    let cost = evaluate_cost(&mesh, &states, &controls, problem, weights)?;
    Ok(BvpSolution {
        mesh,
        states,
        costates,
        costate_rates: rates,
        controls,
        cost,
        max_defect: defect,
        converged: defect <= tol,
        iterations: used,
        weights: *weights,
    })
}
