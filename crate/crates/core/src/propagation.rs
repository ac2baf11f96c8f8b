//! Free-space path loss, received jamming power and the service-denial activation.

use serde::{Deserialize, Serialize};

use crate::beamforming::{optimal_beampattern, FarFieldGeometry};
use crate::error::{Error, Result};
use crate::geometry::{checked_distance, Point};
use crate::scalar::{c, Scalar};

/// Per-antenna nominal power (mW) and carrier wavenumber (rad/m). Antenna gains are unity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams<T> {
    pub nominal_power: T,
    pub wavenumber: T,
}

impl<T: Scalar> RadioParams<T> {
    pub fn new(nominal_power: T, wavenumber: T) -> Result<Self> {
        if !(nominal_power > T::zero() && nominal_power.is_finite()) {
            return Err(Error::input("nominal power must be positive"));
        }
        if !(wavenumber > T::zero() && wavenumber.is_finite()) {
            return Err(Error::input("wavenumber must be positive"));
        }
        Ok(RadioParams {
            nominal_power,
            wavenumber,
        })
    }
}

/// Clamp band of the ReLU-like activation, dBm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivationSpec<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> ActivationSpec<T> {
    pub fn new(lower: T, upper: T) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::input("activation band needs finite lower < upper"));
        }
        Ok(ActivationSpec { lower, upper })
    }
}

impl<T: Scalar> Default for ActivationSpec<T> {
    fn default() -> Self {
        ActivationSpec {
            lower: c(-100.0),
            upper: c(-70.0),
        }
    }
}

/// Shaping applied to received power in the cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation<T> {
    /// Reward raw dBm. A perfect null then yields an infinite cost.
    Identity,
    Band(ActivationSpec<T>),
}

impl<T: Scalar> Default for Activation<T> {
    fn default() -> Self {
        Activation::Band(ActivationSpec::default())
    }
}

impl<T: Scalar> Activation<T> {
    pub fn value(&self, x: T) -> T {
        match self {
            Activation::Identity => x,
            Activation::Band(spec) => sigma(x, spec),
        }
    }

    pub fn slope(&self, x: T) -> T {
        match self {
            Activation::Identity => T::one(),
            Activation::Band(spec) => sigma_prime(x, spec),
        }
    }
}

/// Free-space path loss 1/(4 k^2 d^2).
pub fn fspl<T: Scalar>(distance: T, wavenumber: T) -> Result<T> {
    if !(distance > T::zero()) {
        return Err(Error::degenerate("path loss needs a positive distance"));
    }
    let kd2 = c::<T>(2.0) * wavenumber * distance;
    Ok(T::one() / (kd2 * kd2))
}

/// Path loss in dB, -20 log10(2 k d).
pub fn fspl_db<T: Scalar>(distance: T, wavenumber: T) -> Result<T> {
    Ok(c::<T>(10.0) * fspl(distance, wavenumber)?.log10())
}

/// Value standing in for the power received through a perfect null.
pub fn null_power<T: Scalar>() -> T {
    T::neg_infinity()
}

pub fn is_null_power<T: Scalar>(p: T) -> bool {
    p == T::neg_infinity()
}

/// Received jamming power in dBm for array gain `gain` at `distance` from the array center.
///
/// A zero gain maps to the `-inf` null sentinel.
pub fn jamming_power_dbm<T: Scalar>(gain: T, distance: T, radio: &RadioParams<T>) -> Result<T> {
    if gain < T::zero() || gain.is_nan() {
        return Err(Error::input(format!("negative beampattern gain {gain}")));
    }
    let loss = fspl(distance, radio.wavenumber)?;
    if gain == T::zero() {
        return Ok(null_power());
    }
    let ten = c::<T>(10.0);
    Ok(ten * radio.nominal_power.log10() + ten * gain.log10() + ten * loss.log10())
}

/// Power at the eavesdropper with optimal orientation and the client nulled.
pub fn optimal_power_dbm<T: Scalar>(
    eavesdropper: Point<T>,
    uav: Point<T>,
    ff: &FarFieldGeometry<T>,
    radio: &RadioParams<T>,
    kd: T,
) -> Result<T> {
    let d = checked_distance(uav, eavesdropper, "jammer on the eavesdropper")?;
    jamming_power_dbm(optimal_beampattern(ff, kd), d, radio)
}

/// ReLU-like clamp of `x` to the band.
pub fn sigma<T: Scalar>(x: T, spec: &ActivationSpec<T>) -> T {
    if x < spec.lower {
        spec.lower
    } else if x > spec.upper {
        spec.upper
    } else {
        x
    }
}

/// Slope of [`sigma`]: 1 strictly inside the band, 0 elsewhere including the breakpoints.
pub fn sigma_prime<T: Scalar>(x: T, spec: &ActivationSpec<T>) -> T {
    if x > spec.lower && x < spec.upper {
        T::one()
    } else {
        T::zero()
    }
}
