//! Color-space and transfer-function math.
//!
//! Everything here is exact, invertible scalar math evaluated in f64,
//! independent of any learned component. Image-level wrappers live in
//! [`crate::image`].
//!
//! Conventions:
//! - SDR is BT.709 primaries, pure gamma 2.2, 100 nit peak.
//! - HDR is BT.2020 primaries, SMPTE ST 2084 (PQ), 1000 nit sources.
//! - YCbCr is full range with zero-centered chroma in [-0.5, 0.5].

mod gamut;
mod itp;
mod transfer;
mod ycbcr;

pub use gamut::{gamut_convert_pixel, gamut_matrix, Primaries};
pub use itp::{delta_e_itp_pixel, rgb_to_itp_pixel};
pub use transfer::{
    gamma22_decode, gamma22_encode, pq_decode, pq_encode, TransferFunction, PQ_PEAK_NITS,
};
pub use ycbcr::{rgb_to_ycbcr_pixel, ycbcr_to_rgb_pixel, LUMA_B, LUMA_G, LUMA_R};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// How the pixel values of an encoded raster are to be interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorEncoding {
    pub transfer: TransferFunction,
    pub primaries: Primaries,
    /// Display peak in nits (100 for SDR, 1000 for HDR sources).
    pub peak_nits: f64,
}

impl ColorEncoding {
    /// Gamma-2.2 BT.709 SDR at 100 nits.
    pub fn sdr() -> Self {
        ColorEncoding {
            transfer: TransferFunction::Gamma22,
            primaries: Primaries::Bt709,
            peak_nits: 100.0,
        }
    }

    /// PQ BT.2020 HDR mastered at 1000 nits.
    pub fn hdr_pq() -> Self {
        ColorEncoding {
            transfer: TransferFunction::Pq,
            primaries: Primaries::Bt2020,
            peak_nits: 1000.0,
        }
    }

    /// Enforces the combinations this pipeline supports.
    pub fn validate(&self) -> Result<()> {
        if !(self.peak_nits > 0.0) {
            return Err(Error::Config(format!(
                "peak_nits must be positive, got {}",
                self.peak_nits
            )));
        }
        match (self.transfer, self.primaries) {
            (TransferFunction::Pq, Primaries::Bt709) => Err(Error::Config(
                "PQ encoding requires BT.2020 primaries".into(),
            )),
            (TransferFunction::Gamma22, Primaries::Bt2020) => Err(Error::Config(
                "gamma-2.2 encoding requires BT.709 primaries".into(),
            )),
            _ => Ok(()),
        }
    }
}
