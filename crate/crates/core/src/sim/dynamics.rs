use crate::geometry::Point;
use crate::ode::rk4_step;
use crate::optimizer::UavState;
use crate::scalar::Scalar;

/// RK4 integration of the double integrator on the fixed mesh `0, dt, 2dt, ...`.
///
/// Returns `(t, state)` pairs including both endpoints; the final step is shortened
/// when `duration` is not a multiple of `dt`.
pub fn integrate_dynamics<T, F>(initial: &UavState<T>, mut control: F, dt: T, duration: T) -> Vec<(T, UavState<T>)>
where
    T: Scalar,
    F: FnMut(T) -> Point<T>,
{
    assert!(dt > T::zero(), "time step must be positive");
    let steps = (duration / dt - T::lit(1e-9)).ceil().to_usize().unwrap_or(0);
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = [
        initial.position.x,
        initial.position.y,
        initial.velocity.x,
        initial.velocity.y,
    ];
    out.push((T::zero(), *initial));
    for i in 0..steps {
        let t = dt * T::lit(i as f64);
        let h = (duration - t).min(dt);
        let mut f = |s: T, z: &[T; 4]| {
            let u = control(s);
            Ok::<_, std::convert::Infallible>([z[2], z[3], u.x, u.y])
        };
        y = match rk4_step(&mut f, t, &y, h) {
            Ok(v) => v,
            Err(e) => match e {},
        };
        out.push((t + h, UavState::new(Point::new(y[0], y[1]), Point::new(y[2], y[3]))));
    }
    out
}
