//! SMPTE ST 2084 (PQ) and pure gamma-2.2 transfer functions.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Nonlinear encoding applied to pixel values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferFunction {
    Linear,
    Gamma22,
    Pq,
}

/// Largest luminance the PQ curve can represent, in nits.
pub const PQ_PEAK_NITS: f64 = 10000.0;

// ST 2084 constants.
const PQ_M1: f64 = 2610.0 / 16384.0;
const PQ_M2: f64 = 2523.0 / 4096.0 * 128.0;
const PQ_C1: f64 = 3424.0 / 4096.0;
const PQ_C2: f64 = 2413.0 / 4096.0 * 32.0;
const PQ_C3: f64 = 2392.0 / 4096.0 * 32.0;

/// Encodes absolute luminance in nits to a PQ code value in [0, 1].
///
/// Zero is treated as an exact fixed point (the closed form has a small
/// positive toe at zero that decodes back to zero anyway).
pub fn pq_encode(nits: f64) -> Result<f64> {
    if !nits.is_finite() || nits < 0.0 {
        return Err(Error::Numeric(format!(
            "pq_encode domain is [0, 10000] nits, got {nits}"
        )));
    }
    if nits > PQ_PEAK_NITS {
        return Err(Error::Numeric(format!(
            "pq_encode domain is [0, 10000] nits, got {nits}"
        )));
    }
    if nits == 0.0 {
        return Ok(0.0);
    }
    let y = nits / PQ_PEAK_NITS;
    let yp = y.powf(PQ_M1);
    Ok(((PQ_C1 + PQ_C2 * yp) / (1.0 + PQ_C3 * yp)).powf(PQ_M2))
}

/// Decodes a PQ code value in [0, 1] to absolute luminance in nits.
pub fn pq_decode(code: f64) -> Result<f64> {
    if !code.is_finite() || !(0.0..=1.0).contains(&code) {
        return Err(Error::Numeric(format!(
            "pq_decode domain is [0, 1], got {code}"
        )));
    }
    if code == 0.0 {
        return Ok(0.0);
    }
    let vp = code.powf(1.0 / PQ_M2);
    let num = (vp - PQ_C1).max(0.0);
    let den = PQ_C2 - PQ_C3 * vp;
    Ok(PQ_PEAK_NITS * (num / den).powf(1.0 / PQ_M1))
}

/// Encodes a relative linear value in [0, 1] with a pure 1/2.2 power.
pub fn gamma22_encode(relative: f64) -> Result<f64> {
    if !relative.is_finite() || !(0.0..=1.0).contains(&relative) {
        return Err(Error::Numeric(format!(
            "gamma22_encode domain is [0, 1], got {relative}"
        )));
    }
    Ok(relative.powf(1.0 / 2.2))
}

/// Decodes a gamma-2.2 code value in [0, 1] back to relative linear.
pub fn gamma22_decode(code: f64) -> Result<f64> {
    if !code.is_finite() || !(0.0..=1.0).contains(&code) {
        return Err(Error::Numeric(format!(
            "gamma22_decode domain is [0, 1], got {code}"
        )));
    }
    Ok(code.powf(2.2))
}
