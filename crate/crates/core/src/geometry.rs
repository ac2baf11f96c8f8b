//! Planar points, bearings and the two-element array layout.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point (or displacement) in the horizontal plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub const fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn zero() -> Self {
        Point::new(T::zero(), T::zero())
    }

    /// Unit vector at angle `theta` from the x-axis.
    pub fn from_angle(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Point::new(c, s)
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> T {
        (other - self).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Mirror image across the x-axis.
    pub fn mirror_x(self) -> Self {
        Point::new(self.x, -self.y)
    }

    pub fn cast<U: Scalar>(self) -> Point<U> {
        Point::new(U::lit(self.x.to_f64_lossy()), U::lit(self.y.to_f64_lossy()))
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Scalar> Neg for Point<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Point::new(-self.x, -self.y)
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Direction of `to` as seen from `from`, in `(-pi, pi]`.
pub fn bearing<T: Scalar>(from: Point<T>, to: Point<T>) -> Result<T> {
    let d = to - from;
    if d.x == T::zero() && d.y == T::zero() {
        return Err(Error::degenerate("bearing between coincident points"));
    }
    Ok(d.y.atan2(d.x))
}

pub(crate) fn checked_distance<T: Scalar>(a: Point<T>, b: Point<T>, what: &str) -> Result<T> {
    let d = a.distance(b);
    if d > T::zero() {
        Ok(d)
    } else {
        Err(Error::degenerate(format!("{what}: coincident points")))
    }
}

/// Two omnidirectional antennas mounted symmetrically about the airframe center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry<T> {
    pub center: Point<T>,
    /// Angle of the second antenna about the center.
    pub orientation: T,
    /// Antenna spacing D, meters.
    pub separation: T,
    /// k = 2 pi / lambda, radians per meter.
    pub wavenumber: T,
}

impl<T: Scalar> ArrayGeometry<T> {
    pub fn new(center: Point<T>, orientation: T, separation: T, wavenumber: T) -> Result<Self> {
        if !(separation > T::zero() && separation.is_finite()) {
            return Err(Error::input("antenna separation must be positive"));
        }
        if !(wavenumber > T::zero() && wavenumber.is_finite()) {
            return Err(Error::input("wavenumber must be positive"));
        }
        if !center.is_finite() || !orientation.is_finite() {
            return Err(Error::input("array center and orientation must be finite"));
        }
        Ok(ArrayGeometry {
            center,
            orientation,
            separation,
            wavenumber,
        })
    }

    fn half_baseline(&self) -> Point<T> {
        Point::from_angle(self.orientation) * (self.separation / (T::one() + T::one()))
    }

    /// Positions of antenna 1 and antenna 2.
    pub fn antennas(&self) -> (Point<T>, Point<T>) {
        let h = self.half_baseline();
        (self.center - h, self.center + h)
    }

    /// Distances from `p` to antenna 1 and antenna 2; errors if `p` sits on either one.
    pub fn distances(&self, p: Point<T>) -> Result<(T, T)> {
        let (p1, p2) = self.antennas();
        let d1 = checked_distance(p, p1, "point on antenna 1")?;
        let d2 = checked_distance(p, p2, "point on antenna 2")?;
        Ok((d1, d2))
    }

    /// Electrical size kD.
    pub fn kd(&self) -> T {
        self.wavenumber * self.separation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bearing_examples() {
        let o = Point::new(0.0, 0.0);
        assert_eq!(bearing(o, Point::new(1.0, 0.0)).unwrap(), 0.0);
        assert!((bearing(o, Point::new(0.0, 1.0)).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((bearing(Point::new(1.0, 1.0), o).unwrap() + 3.0 * PI / 4.0).abs() < 1e-15);
        assert!(matches!(bearing(o, o), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn bearing_covers_pi_not_minus_pi() {
        let b = bearing(Point::new(0.0, 0.0), Point::new(-1.0, 0.0)).unwrap();
        assert_eq!(b, PI);
    }

    #[test]
    fn antenna_spacing_is_exact() {
        let g = ArrayGeometry::new(Point::new(10.0f64, -4.0), 0.7, 0.0952, 33.0).unwrap();
        let (p1, p2) = g.antennas();
        assert!((p1.distance(p2) - 0.0952).abs() < 1e-15);
        let mid = (p1 + p2) * 0.5;
        assert!(mid.distance(g.center) < 1e-14);
        // antenna 2 sits in the orientation direction
        let dir = p2 - p1;
        assert!((dir.y.atan2(dir.x) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn geometry_rejects_bad_parameters() {
        assert!(ArrayGeometry::new(Point::new(0.0, 0.0), 0.0, 0.0, 1.0).is_err());
        assert!(ArrayGeometry::new(Point::new(0.0, 0.0), 0.0, 1.0, -1.0).is_err());
        assert!(ArrayGeometry::new(Point::new(f64::NAN, 0.0), 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn distances_reject_antenna_positions() {
        let g = ArrayGeometry::new(Point::new(0.0, 0.0), 0.0, 1.0, 1.0).unwrap();
        let (p1, _) = g.antennas();
        assert!(g.distances(p1).is_err());
    }
}
