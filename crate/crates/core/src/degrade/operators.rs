//! Tone-mapping operators that render HDR sources into SDR styles.
//!
//! Four operators follow published curves (Reinhard, BT.2446 method A,
//! BT.2390 EETF, Hable filmic); four are parameterized analytic surrogates
//! (two gamma-compression variants, a per-channel saturation clip, a mu-law
//! curve). Together they cover global luminance compression applied either
//! as a chromaticity-preserving luminance ratio or per channel, the latter
//! distorting chroma near the top of the range.

use crate::color::{
    gamma22_encode, gamut_convert_pixel, pq_decode, pq_encode, ColorEncoding, Primaries,
};
use crate::error::{Error, Result};
use crate::image::{EncodedImage, LinearImage};
use ndarray::Array3;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// BT.2020 luminance weights (linear domain).
const LUM_2020: [f64; 3] = [0.2627, 0.6780, 0.0593];

/// SDR peak used by every operator.
const SDR_NITS: f64 = 100.0;

/// Where gamut reduction happens relative to the tone curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GamutStrategy {
    /// Tone-map in BT.2020, then convert to BT.709 and hard-clip.
    Clip,
    /// Convert to BT.709 and hard-clip negatives first, then tone-map.
    MatrixThenClip,
}

/// A named SDR rendering style: a monotone luminance curve plus gamut
/// handling and an application mode (ratio-based or per channel).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegradationOperator {
    pub id: String,
    pub params: BTreeMap<String, f64>,
    pub gamut_strategy: GamutStrategy,
}

impl DegradationOperator {
    /// Ids of all eight built-in operators.
    pub const BUILTIN_IDS: [&'static str; 8] = [
        "reinhard",
        "bt2446a",
        "bt2390eetf",
        "hable",
        "gamma_compress_a",
        "gamma_compress_b",
        "saturation_clip",
        "mulaw",
    ];

    /// Constructs a built-in operator with its documented default params.
    pub fn builtin(id: &str) -> Result<Self> {
        let mut params = BTreeMap::new();
        let gamut_strategy = match id {
            "reinhard" => {
                params.insert("white_nits".into(), 100.0);
                GamutStrategy::MatrixThenClip
            }
            "bt2446a" => {
                params.insert("src_peak_nits".into(), 1000.0);
                GamutStrategy::Clip
            }
            "bt2390eetf" => {
                params.insert("src_peak_nits".into(), 1000.0);
                GamutStrategy::MatrixThenClip
            }
            "hable" => {
                params.insert("whitepoint".into(), 10.0);
                params.insert("exposure".into(), 1.0);
                GamutStrategy::Clip
            }
            "gamma_compress_a" => {
                params.insert("gamma".into(), 0.45);
                params.insert("gain".into(), 1.0);
                GamutStrategy::MatrixThenClip
            }
            "gamma_compress_b" => {
                params.insert("gamma".into(), 0.85);
                params.insert("gain".into(), 1.18);
                GamutStrategy::Clip
            }
            "saturation_clip" => {
                params.insert("knee_nits".into(), 300.0);
                GamutStrategy::Clip
            }
            "mulaw" => {
                params.insert("mu".into(), 255.0);
                GamutStrategy::MatrixThenClip
            }
            _ => {
                return Err(Error::Config(format!("unknown degradation operator '{id}'")));
            }
        };
        Ok(DegradationOperator {
            id: id.to_string(),
            params,
            gamut_strategy,
        })
    }

    /// All eight built-ins.
    pub fn all_builtin() -> Vec<Self> {
        Self::BUILTIN_IDS
            .iter()
            .map(|id| Self::builtin(id).expect("builtin ids are valid"))
            .collect()
    }

    fn param(&self, name: &str) -> f64 {
        *self
            .params
            .get(name)
            .unwrap_or_else(|| panic!("operator {} missing param {name}", self.id))
    }

    /// True if the curve is applied per channel (distorting chroma)
    /// rather than as a luminance ratio.
    pub fn is_per_channel(&self) -> bool {
        matches!(
            self.id.as_str(),
            "hable" | "gamma_compress_b" | "saturation_clip" | "mulaw"
        )
    }

    /// The scalar tone curve: absolute nits in [0, src peak] to relative
    /// SDR output in [0, 1]. Monotone nondecreasing for every operator.
    pub fn luminance_curve(&self, nits: f64) -> f64 {
        let nits = nits.max(0.0);
        match self.id.as_str() {
            "reinhard" => {
                let ln = nits / self.param("white_nits");
                ln / (1.0 + ln)
            }
            "bt2446a" => bt2446a_curve(nits, self.param("src_peak_nits")),
            "bt2390eetf" => bt2390_eetf_curve(nits, self.param("src_peak_nits")),
            "hable" => {
                let x = self.param("exposure") * nits / SDR_NITS;
                let w = self.param("whitepoint");
                (hable_partial(x) / hable_partial(w)).clamp(0.0, 1.0)
            }
            "gamma_compress_a" | "gamma_compress_b" => {
                let x = (nits / 1000.0).min(1.0);
                (self.param("gain") * x.powf(self.param("gamma"))).clamp(0.0, 1.0)
            }
            "saturation_clip" => (nits / self.param("knee_nits")).clamp(0.0, 1.0),
            "mulaw" => {
                let mu = self.param("mu");
                let x = (nits / 1000.0).min(1.0);
                (1.0 + mu * x).ln() / (1.0 + mu).ln()
            }
            other => panic!("unknown operator id '{other}'"),
        }
    }

    /// Renders a linear BT.2020 HDR image into this operator's SDR style.
    ///
    /// Output is gamma-2.2 BT.709 in [0, 1]; deterministic for fixed params.
    pub fn apply(&self, hdr: &LinearImage) -> Result<EncodedImage> {
        if hdr.primaries != Primaries::Bt2020 {
            return Err(Error::Data(format!(
                "operator {} expects BT.2020 input, got {:?}",
                self.id, hdr.primaries
            )));
        }
        let (h, w) = (hdr.height(), hdr.width());
        let mut out = Array3::zeros((h, w, 3));
        for i in 0..h {
            for j in 0..w {
                let rgb = [
                    hdr.pixels[[i, j, 0]] as f64,
                    hdr.pixels[[i, j, 1]] as f64,
                    hdr.pixels[[i, j, 2]] as f64,
                ];
                let rel = self.map_pixel(rgb);
                for c in 0..3 {
                    out[[i, j, c]] = gamma22_encode(rel[c])? as f32;
                }
            }
        }
        EncodedImage::new(out, ColorEncoding::sdr())
    }

    /// Maps one linear BT.2020 pixel in nits to relative BT.709 SDR [0,1].
    pub fn map_pixel(&self, rgb_2020_nits: [f64; 3]) -> [f64; 3] {
        match self.gamut_strategy {
            GamutStrategy::MatrixThenClip => {
                let rgb709 = clip_nonneg(gamut_convert_pixel(
                    rgb_2020_nits,
                    Primaries::Bt2020,
                    Primaries::Bt709,
                ));
                clamp01(self.tone_map(rgb709, &LUM_709))
            }
            GamutStrategy::Clip => {
                let mapped = self.tone_map(rgb_2020_nits, &LUM_2020);
                clamp01(gamut_convert_pixel(
                    mapped,
                    Primaries::Bt2020,
                    Primaries::Bt709,
                ))
            }
        }
    }

    fn tone_map(&self, rgb_nits: [f64; 3], lum_weights: &[f64; 3]) -> [f64; 3] {
        if self.is_per_channel() {
            [
                self.luminance_curve(rgb_nits[0]),
                self.luminance_curve(rgb_nits[1]),
                self.luminance_curve(rgb_nits[2]),
            ]
        } else {
            let lum = lum_weights[0] * rgb_nits[0]
                + lum_weights[1] * rgb_nits[1]
                + lum_weights[2] * rgb_nits[2];
            if lum <= 0.0 {
                return [0.0, 0.0, 0.0];
            }
            let scale = self.luminance_curve(lum) / lum;
            [
                rgb_nits[0] * scale,
                rgb_nits[1] * scale,
                rgb_nits[2] * scale,
            ]
        }
    }
}

/// BT.709 luminance weights, for ratio mapping after gamut reduction.
const LUM_709: [f64; 3] = [0.2126, 0.7152, 0.0722];

fn clip_nonneg(rgb: [f64; 3]) -> [f64; 3] {
    [rgb[0].max(0.0), rgb[1].max(0.0), rgb[2].max(0.0)]
}

fn clamp01(rgb: [f64; 3]) -> [f64; 3] {
    [
        rgb[0].clamp(0.0, 1.0),
        rgb[1].clamp(0.0, 1.0),
        rgb[2].clamp(0.0, 1.0),
    ]
}

/// Hable filmic shoulder/toe rational, un-normalized.
fn hable_partial(x: f64) -> f64 {
    const A: f64 = 0.15;
    const B: f64 = 0.50;
    const C: f64 = 0.10;
    const D: f64 = 0.20;
    const E: f64 = 0.02;
    const F: f64 = 0.30;
    ((x * (A * x + C * B) + D * E) / (x * (A * x + B) + D * F)) - E / F
}

/// BT.2446 method A luminance conversion, `src_peak` nits down to 100 nits.
fn bt2446a_curve(nits: f64, src_peak: f64) -> f64 {
    let l_hdr = src_peak;
    let l_sdr = SDR_NITS;
    let rho_hdr = 1.0 + 32.0 * (l_hdr / 10000.0).powf(1.0 / 2.4);
    let yp = (nits.min(l_hdr) / l_hdr).powf(1.0 / 2.4);
    let ypp = (1.0 + (rho_hdr - 1.0) * yp).ln() / rho_hdr.ln();
    let yc = if ypp <= 0.7399 {
        1.0770 * ypp
    } else if ypp < 0.9909 {
        -1.1510 * ypp * ypp + 2.7811 * ypp - 0.6302
    } else {
        0.5 * ypp + 0.5
    };
    let rho_sdr = 1.0 + 32.0 * (l_sdr / 10000.0).powf(1.0 / 2.4);
    let y_sdr = (rho_sdr.powf(yc.clamp(0.0, 1.0)) - 1.0) / (rho_sdr - 1.0);
    y_sdr.powf(2.4).clamp(0.0, 1.0)
}

/// BT.2390 EETF in the normalized PQ domain; linear below the knee,
/// Hermite roll-off above it.
fn bt2390_eetf_curve(nits: f64, src_peak: f64) -> f64 {
    let src_white = pq_encode(src_peak).expect("src peak in PQ domain");
    let max_lum = pq_encode(SDR_NITS).expect("SDR peak in PQ domain") / src_white;
    let ks = 1.5 * max_lum - 0.5;
    let e1 = pq_encode(nits.min(src_peak)).expect("input in PQ domain") / src_white;
    let e2 = if e1 < ks {
        e1
    } else {
        let t = (e1 - ks) / (1.0 - ks);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * ks
            + (t3 - 2.0 * t2 + t) * (1.0 - ks)
            + (-2.0 * t3 + 3.0 * t2) * max_lum
    };
    let out_nits = pq_decode((e2 * src_white).clamp(0.0, 1.0)).expect("EETF output in PQ domain");
    (out_nits / SDR_NITS).clamp(0.0, 1.0)
}
