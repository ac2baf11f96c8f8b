//! Two-element beampattern, client null steering and far-field orientation control.
//!
//! The exact beampattern uses true antenna-to-point distances. Orientation control
//! works on the far-field form, where the gain toward a point depends only on its
//! bearing from the array center.

use crate::error::{Error, Result};
use crate::geometry::{bearing, checked_distance, ArrayGeometry, Point};
use crate::scalar::{c, wrap_angle, Scalar};

/// Phases of the two antenna feeds and the array orientation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BeamControl<T> {
    pub phi1: T,
    pub phi2: T,
    pub theta_g: T,
}

impl<T: Scalar> BeamControl<T> {
    /// Copy with every angle wrapped to `(-pi, pi]`, for output.
    pub fn wrapped(&self) -> Self {
        BeamControl {
            phi1: wrap_angle(self.phi1),
            phi2: wrap_angle(self.phi2),
            theta_g: wrap_angle(self.theta_g),
        }
    }
}

/// Bearings of client and eavesdropper from the array center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldGeometry<T> {
    pub theta_c: T,
    pub theta_e: T,
    /// sin of half the wrapped angular separation.
    pub mu: T,
}

impl<T: Scalar> FarFieldGeometry<T> {
    pub fn new(theta_c: T, theta_e: T) -> Self {
        let half = wrap_angle(theta_c - theta_e) / c(2.0);
        FarFieldGeometry {
            theta_c,
            theta_e,
            mu: half.sin(),
        }
    }

    /// Builds the far-field view of `client` and `eavesdropper` from `center`.
    pub fn from_points(center: Point<T>, client: Point<T>, eavesdropper: Point<T>) -> Result<Self> {
        let theta_c = bearing(center, client)
            .map_err(|_| Error::degenerate("array center coincides with the client"))?;
        let theta_e = bearing(center, eavesdropper)
            .map_err(|_| Error::degenerate("array center coincides with the eavesdropper"))?;
        Ok(Self::new(theta_c, theta_e))
    }

    /// Wrapped separation theta_c - theta_e in `(-pi, pi]`.
    pub fn separation(&self) -> T {
        wrap_angle(self.theta_c - self.theta_e)
    }

    /// Bisector of the two bearings, consistent with the sign of `mu`.
    pub fn midline(&self) -> T {
        self.theta_e + self.separation() / c(2.0)
    }

    /// Whether full gain 4 is out of reach (`|mu| < pi / (2 kD)`).
    pub fn below_threshold(&self, kd: T) -> bool {
        self.mu.abs() < T::FRAC_PI_2() / kd
    }
}

/// |exp(j(k d1 + phi1)) + exp(j(k d2 + phi2))|^2 at point `p`.
pub fn beampattern<T: Scalar>(p: Point<T>, geom: &ArrayGeometry<T>, phi1: T, phi2: T) -> Result<T> {
    let delta = path_difference(p, geom)?;
    let half = (geom.wavenumber * delta + phi1 - phi2) / c(2.0);
    let cos = half.cos();
    Ok(c::<T>(4.0) * cos * cos)
}

/// d1(p) - d2(p), computed without cancellation between the two long distances.
pub fn path_difference<T: Scalar>(p: Point<T>, geom: &ArrayGeometry<T>) -> Result<T> {
    let (d1, d2) = geom.distances(p)?;
    let (p1, p2) = geom.antennas();
    // d1^2 - d2^2 = 2 (p2 - p1) . (p - center)
    let num = c::<T>(2.0) * (p2 - p1).dot(p - geom.center);
    Ok(num / (d1 + d2))
}

/// Phase of antenna 2 that places an exact null on `client` for a given `phi1`.
pub fn nulling_phase<T: Scalar>(phi1: T, client: Point<T>, geom: &ArrayGeometry<T>) -> Result<T> {
    let delta = path_difference(client, geom)?;
    Ok(phi1 + T::PI() + geom.wavenumber * delta)
}

/// One sample of the jammer's motion for Doppler compensation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionSample<T> {
    pub time: T,
    pub velocity: Point<T>,
    pub position: Point<T>,
}

/// Running trapezoidal integral of the Doppler phase offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerAccumulator<T> {
    wavenumber: T,
    phase: T,
    last: Option<(T, T)>,
}

impl<T: Scalar> DopplerAccumulator<T> {
    pub fn new(wavenumber: T) -> Self {
        DopplerAccumulator {
            wavenumber,
            phase: T::zero(),
            last: None,
        }
    }

    fn rate(&self, s: &MotionSample<T>, eavesdropper: Point<T>) -> Result<T> {
        let los = eavesdropper - s.position;
        let range = checked_distance(s.position, eavesdropper, "jammer on the eavesdropper")?;
        Ok(self.wavenumber * s.velocity.dot(los) / range)
    }

    /// Adds a sample and returns phi1 at its time. The first sample defines t = 0.
    pub fn push(&mut self, sample: &MotionSample<T>, eavesdropper: Point<T>) -> Result<T> {
        let f = self.rate(sample, eavesdropper)?;
        if let Some((t0, f0)) = self.last {
            if !(sample.time > t0) {
                return Err(Error::input("Doppler samples must have strictly increasing times"));
            }
            self.phase -= (sample.time - t0) * (f + f0) / c(2.0);
        }
        self.last = Some((sample.time, f));
        Ok(self.phase)
    }

    pub fn phase(&self) -> T {
        self.phase
    }
}

/// Doppler-compensating phase phi1 at the last sample time.
pub fn doppler_phase<T: Scalar>(
    samples: &[MotionSample<T>],
    eavesdropper: Point<T>,
    wavenumber: T,
) -> Result<T> {
    let mut acc = DopplerAccumulator::new(wavenumber);
    for s in samples {
        acc.push(s, eavesdropper)?;
    }
    Ok(acc.phase())
}

/// Far-field gain toward the eavesdropper with the client nulled, for orientation `theta_g`.
pub fn far_field_beampattern<T: Scalar>(ff: &FarFieldGeometry<T>, theta_g: T, kd: T) -> T {
    let arg = c::<T>(2.0) * kd * ff.mu * (ff.midline() - theta_g).sin();
    let s = (arg / c(2.0)).sin();
    c::<T>(4.0) * s * s
}

/// The two maximizing orientations `(plus, minus)`.
pub fn optimal_orientation_branches<T: Scalar>(ff: &FarFieldGeometry<T>, kd: T) -> (T, T) {
    let mid = ff.midline();
    let offset = if ff.below_threshold(kd) {
        T::FRAC_PI_2()
    } else {
        // |mu| >= pi/(2kD) > 0 here, so the ratio lies in (0, 1]
        (T::FRAC_PI_2() / (kd * ff.mu.abs())).min(T::one()).asin()
    };
    (mid + offset, mid - offset)
}

/// Orientation maximizing the far-field gain toward the eavesdropper.
///
/// With `previous` the branch closest to it is kept, otherwise the `+` branch.
pub fn optimal_orientation<T: Scalar>(ff: &FarFieldGeometry<T>, kd: T, previous: Option<T>) -> T {
    let (plus, minus) = optimal_orientation_branches(ff, kd);
    match previous {
        Some(prev) => {
            let dp = wrap_angle(plus - prev).abs();
            let dm = wrap_angle(minus - prev).abs();
            // unwrap onto the previous angle so theta_g stays continuous
            if dm < dp {
                prev + wrap_angle(minus - prev)
            } else {
                prev + wrap_angle(plus - prev)
            }
        }
        None => plus,
    }
}

/// Best achievable far-field gain toward the eavesdropper.
pub fn optimal_beampattern<T: Scalar>(ff: &FarFieldGeometry<T>, kd: T) -> T {
    if ff.below_threshold(kd) {
        let s = (kd * ff.mu).sin();
        c::<T>(4.0) * s * s
    } else {
        c(4.0)
    }
}
