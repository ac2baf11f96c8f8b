//! Floating point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar the geometry, beamforming and optimal-control code is written against.
///
/// Implemented for `f32` and `f64`. Tolerances quoted throughout the crate assume `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for [`Scalar::lit`].
#[inline]
pub(crate) fn c<T: Scalar>(x: f64) -> T {
    T::lit(x)
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle<T: Scalar>(theta: T) -> T {
    let two_pi = T::TAU();
    let mut w = theta - two_pi * (theta / two_pi).round();
    if w <= -T::PI() {
        w += two_pi;
    } else if w > T::PI() {
        w -= two_pi;
    }
    w
}

/// Smallest absolute angular distance between two angles.
pub fn angular_distance<T: Scalar>(a: T, b: T) -> T {
    wrap_angle(a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_lands_in_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(2.0 * PI)).abs() < 1e-15);
        assert!((wrap_angle(-0.5f64) + 0.5).abs() < 1e-15);
        assert!((wrap_angle(7.0f32) - (7.0 - 2.0 * std::f32::consts::PI)).abs() < 1e-6);
    }

    #[test]
    fn angular_distance_is_symmetric() {
        assert!((angular_distance(3.0, -3.0) - (2.0 * PI - 6.0)).abs() < 1e-12);
        assert!((angular_distance(-3.0, 3.0) - (2.0 * PI - 6.0)).abs() < 1e-12);
    }
}
