//! Fixed-step classical Runge-Kutta.

use crate::scalar::{c, Scalar};

/// One RK4 step of `y' = f(t, y)` for a fixed-size state.
pub fn rk4_step<T, const N: usize, F, E>(f: &mut F, t: T, y: &[T; N], h: T) -> Result<[T; N], E>
where
    T: Scalar,
    F: FnMut(T, &[T; N]) -> Result<[T; N], E>,
{
    let half = h / c(2.0);
    let axpy = |a: T, x: &[T; N], y: &[T; N]| {
        let mut out = *y;
        for (o, xi) in out.iter_mut().zip(x) {
            *o += a * *xi;
        }
        out
    };
    let k1 = f(t, y)?;
    let k2 = f(t + half, &axpy(half, &k1, y))?;
    let k3 = f(t + half, &axpy(half, &k2, y))?;
    let k4 = f(t + h, &axpy(h, &k3, y))?;
    let sixth = h / c(6.0);
    let mut out = *y;
    for i in 0..N {
        out[i] += sixth * (k1[i] + c::<T>(2.0) * (k2[i] + k3[i]) + k4[i]);
    }
    Ok(out)
}
