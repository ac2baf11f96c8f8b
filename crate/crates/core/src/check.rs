//! Randomized self-test run by the `check` verb.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beamforming::{
    beampattern, far_field_beampattern, nulling_phase, optimal_beampattern, optimal_orientation_branches,
    FarFieldGeometry,
};
use crate::error::Result;
use crate::geometry::{ArrayGeometry, Point};
use crate::optimizer::{control_from_costate, grad_beampattern, grad_fspl, midpoint_guess, solve_bvp};
use crate::propagation::fspl;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Sample counts for [`run_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSizes {
    pub null_depth: usize,
    pub orientation: usize,
    pub gradients: usize,
}

impl Default for CheckSizes {
    fn default() -> Self {
        CheckSizes {
            null_depth: 10_000,
            orientation: 1_000,
            gradients: 1_000,
        }
    }
}

fn point(rng: &mut ChaCha8Rng, half_width: f64) -> Point<f64> {
    Point::new(rng.gen_range(-half_width..half_width), rng.gen_range(-half_width..half_width))
}

fn null_depth(rng: &mut ChaCha8Rng, scenario: &Scenario, n: usize) -> Result<CheckOutcome> {
    let (k, d) = (scenario.wavenumber(), scenario.antenna_separation);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let center = point(rng, 1e4);
        let client = loop {
            let c = point(rng, 1e4);
            if c.distance(center) > 10.0 {
                break c;
            }
        };
        let geom = ArrayGeometry::new(center, rng.gen_range(-10.0..10.0), d, k)?;
        let phi1 = rng.gen_range(-100.0..100.0);
        let phi2 = nulling_phase(phi1, client, &geom)?;
        worst = worst.max(beampattern(client, &geom, phi1, phi2)?);
    }
    Ok(CheckOutcome {
        name: "null depth",
        passed: worst <= 1e-12,
        detail: format!("max client gain {worst:e} over {n} geometries"),
    })
}

fn orientation(rng: &mut ChaCha8Rng, n: usize) -> CheckOutcome {
    let mut worst_gap: f64 = 0.0;
    let mut worst_branch: f64 = 0.0;
    for _ in 0..n {
        let ff = FarFieldGeometry::new(
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        let kd = rng.gen_range(0.1..10.0);
        let (plus, minus) = optimal_orientation_branches(&ff, kd);
        let bp = far_field_beampattern(&ff, plus, kd);
        let bm = far_field_beampattern(&ff, minus, kd);
        let grid = (0..3601)
            .map(|i| far_field_beampattern(&ff, -std::f64::consts::PI + i as f64 * std::f64::consts::TAU / 3600.0, kd))
            .fold(0.0, f64::max);
        worst_gap = worst_gap.max(grid - bp);
        worst_branch = worst_branch.max((bp - bm).abs());
    }
    CheckOutcome {
        name: "orientation optimum",
        passed: worst_gap <= 1e-6 && worst_branch <= 1e-12,
        detail: format!("grid excess {worst_gap:e}, branch mismatch {worst_branch:e} over {n} draws"),
    }
}

fn relative(a: Point<f64>, b: Point<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn gradients(rng: &mut ChaCha8Rng, scenario: &Scenario, n: usize) -> Result<CheckOutcome> {
    let (k, d) = (scenario.wavenumber(), scenario.antenna_separation);
    let kd = k * d;
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < n {
        let (uav, client, eav) = (point(rng, 5e3), point(rng, 5e3), point(rng, 5e3));
        if uav.distance(client) < 100.0 || uav.distance(eav) < 100.0 {
            continue;
        }
        let ff = FarFieldGeometry::from_points(uav, client, eav)?;
        if !ff.below_threshold(kd) || ff.mu.abs() < 1e-3 || ff.mu.abs() > 0.95 * std::f64::consts::FRAC_PI_2 / kd {
            continue;
        }
        used += 1;
        let fd = |f: &dyn Fn(Point<f64>) -> Result<f64>| -> Result<Point<f64>> {
            let ex = Point::new(h, 0.0);
            let ey = Point::new(0.0, h);
            Ok(Point::new(
                (f(uav + ex)? - f(uav - ex)?) / (2.0 * h),
                (f(uav + ey)? - f(uav - ey)?) / (2.0 * h),
            ))
        };
        let l = fd(&|p| fspl(p.distance(eav), k))?;
        worst = worst.max(relative(grad_fspl(uav, eav, k)?, l));
        let b = fd(&|p| Ok(optimal_beampattern(&FarFieldGeometry::from_points(p, client, eav)?, kd)))?;
        worst = worst.max(relative(grad_beampattern(uav, eav, client, k, d)?, b));
    }
    Ok(CheckOutcome {
        name: "gradient fidelity",
        passed: worst <= 1e-5,
        detail: format!("max relative error {worst:e} over {n} geometries"),
    })
}

fn scenario_plan(scenario: &Scenario) -> Result<CheckOutcome> {
    let mission = scenario.mission();
    let problem = mission.problem_at(0.0);
    let w = scenario.weights;
    let guess = midpoint_guess(&problem, &scenario.uav_initial, &w, scenario.solver.nodes);
    let sol = solve_bvp(&problem, &w, &scenario.uav_initial, &guess, &scenario.solver)?;
    let saturated = sol
        .controls
        .iter()
        .all(|u| u.x.abs() <= w.u_bar + 1e-12 && u.y.abs() <= w.u_bar + 1e-12);
    let idempotent = sol
        .costates
        .iter()
        .zip(&sol.controls)
        .all(|(cs, u)| control_from_costate(cs, &w) == *u);
    Ok(CheckOutcome {
        name: "initial plan",
        passed: sol.converged && saturated && idempotent,
        detail: format!(
            "converged {} (defect {:e}, {} iterations), bound {}, control law {}",
            sol.converged,
            sol.max_defect,
            sol.iterations,
            if saturated { "ok" } else { "violated" },
            if idempotent { "consistent" } else { "inconsistent" }
        ),
    })
}

/// Runs the invariant suite with the scenario's radio parameters and seed.
pub fn run_check(scenario: &Scenario, sizes: &CheckSizes) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut out = vec![
        null_depth(&mut rng, scenario, sizes.null_depth)?,
        orientation(&mut rng, sizes.orientation),
        gradients(&mut rng, scenario, sizes.gradients)?,
    ];
    out.push(scenario_plan(scenario)?);
    Ok(out)
}
