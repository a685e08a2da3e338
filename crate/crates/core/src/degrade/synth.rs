//! Procedural HDR test scenes.
//!
//! Desk-scale substitutes for real captures: every pattern emits linear
//! BT.2020 nits in [0, 1000] with content above 100 nits so SDR operators
//! actually compress, and is deterministic per seed.

use crate::color::Primaries;
use crate::error::{Error, Result};
use crate::image::LinearImage;
use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Available procedural scene families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthPattern {
    /// Horizontal luminance ramp 0..1000 nits with a mild vertical tint sweep.
    Ramp,
    /// Hue wheel at varying saturation and brightness.
    ColorSweep,
    /// Dim base with bright specular blobs (>= 5% of pixels above 500 nits).
    Highlights,
    /// Multi-octave value noise scaled to the full range.
    NoiseTexture,
}

impl SynthPattern {
    pub const ALL: [SynthPattern; 4] = [
        SynthPattern::Ramp,
        SynthPattern::ColorSweep,
        SynthPattern::Highlights,
        SynthPattern::NoiseTexture,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SynthPattern::Ramp => "ramp",
            SynthPattern::ColorSweep => "color_sweep",
            SynthPattern::Highlights => "highlights",
            SynthPattern::NoiseTexture => "noise_texture",
        }
    }
}

const PEAK: f32 = 1000.0;

/// Generates one procedural HDR scene. `size` is (height, width), both >= 16.
pub fn make_synthetic_hdr(
    pattern: SynthPattern,
    size: (usize, usize),
    seed: u64,
) -> Result<LinearImage> {
    let (h, w) = size;
    if h < 16 || w < 16 {
        return Err(Error::Config(format!(
            "synthetic HDR needs size >= 16x16, got {h}x{w}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let pixels = match pattern {
        SynthPattern::Ramp => ramp(h, w, &mut rng),
        SynthPattern::ColorSweep => color_sweep(h, w, &mut rng),
        SynthPattern::Highlights => highlights(h, w, &mut rng),
        SynthPattern::NoiseTexture => noise_texture(h, w, &mut rng),
    };
    LinearImage::new(pixels, Primaries::Bt2020)
}

fn ramp(h: usize, w: usize, rng: &mut ChaCha12Rng) -> Array3<f32> {
    let phase: f32 = rng.gen_range(0.0..std::f32::consts::TAU);
    let tint: f32 = rng.gen_range(0.05..0.25);
    Array3::from_shape_fn((h, w, 3), |(i, j, c)| {
        let x = j as f32 / (w - 1) as f32;
        let y = i as f32 / (h - 1) as f32;
        let lum = PEAK * x;
        // gentle tint that keeps the first and last columns exact
        let sweep = (y * std::f32::consts::TAU + phase + c as f32 * 2.1).sin();
        let v = lum * (1.0 + tint * sweep * x * (1.0 - x) * 4.0);
        v.clamp(0.0, PEAK)
    })
}

fn color_sweep(h: usize, w: usize, rng: &mut ChaCha12Rng) -> Array3<f32> {
    let phase: f32 = rng.gen_range(0.0..std::f32::consts::TAU);
    Array3::from_shape_fn((h, w, 3), |(i, j, c)| {
        let x = j as f32 / (w - 1) as f32;
        let y = i as f32 / (h - 1) as f32;
        let hue = x * std::f32::consts::TAU + phase;
        let sat = 0.25 + 0.75 * y;
        let base = (hue + c as f32 * std::f32::consts::TAU / 3.0).cos() * 0.5 + 0.5;
        let lum = 20.0 + 780.0 * (0.5 - 0.5 * (y * std::f32::consts::TAU).cos());
        (lum * (1.0 - sat + sat * base)).clamp(0.0, PEAK)
    })
}

fn highlights(h: usize, w: usize, rng: &mut ChaCha12Rng) -> Array3<f32> {
    let mut img = Array3::from_shape_fn((h, w, 3), |(i, j, c)| {
        // dim textured base, 5..60 nits
        let v = ((i * 7 + j * 13 + c * 29) % 97) as f32 / 97.0;
        5.0 + 55.0 * v
    });
    // enough blobs to guarantee >= 5% of pixels above 500 nits
    let n_blobs = (h * w / 300).max(6);
    for _ in 0..n_blobs {
        let ci = rng.gen_range(0..h) as f32;
        let cj = rng.gen_range(0..w) as f32;
        let radius: f32 = rng.gen_range(3.0..(h.min(w) as f32 / 4.0));
        let peak: f32 = rng.gen_range(600.0..PEAK);
        let warm: f32 = rng.gen_range(0.6..1.0);
        for i in 0..h {
            for j in 0..w {
                let d2 = (i as f32 - ci).powi(2) + (j as f32 - cj).powi(2);
                let fall = (-d2 / (radius * radius)).exp();
                if fall > 1e-3 {
                    let add = peak * fall;
                    img[[i, j, 0]] = (img[[i, j, 0]] + add).min(PEAK);
                    img[[i, j, 1]] = (img[[i, j, 1]] + add * warm).min(PEAK);
                    img[[i, j, 2]] = (img[[i, j, 2]] + add * warm * warm).min(PEAK);
                }
            }
        }
    }
    img
}

fn noise_texture(h: usize, w: usize, rng: &mut ChaCha12Rng) -> Array3<f32> {
    // value noise: random lattice per octave, bilinear upsample, sum
    let octaves = [(4usize, 0.5f32), (8, 0.3), (16, 0.2)];
    let mut acc = vec![0.0f32; h * w];
    for &(cells, weight) in &octaves {
        let gh = cells + 1;
        let gw = cells + 1;
        let lattice: Vec<f32> = (0..gh * gw).map(|_| rng.gen::<f32>()).collect();
        for i in 0..h {
            for j in 0..w {
                let fy = i as f32 / (h - 1) as f32 * (cells as f32);
                let fx = j as f32 / (w - 1) as f32 * (cells as f32);
                let y0 = (fy as usize).min(cells - 1);
                let x0 = (fx as usize).min(cells - 1);
                let ty = fy - y0 as f32;
                let tx = fx - x0 as f32;
                let v00 = lattice[y0 * gw + x0];
                let v01 = lattice[y0 * gw + x0 + 1];
                let v10 = lattice[(y0 + 1) * gw + x0];
                let v11 = lattice[(y0 + 1) * gw + x0 + 1];
                let v = v00 * (1.0 - ty) * (1.0 - tx)
                    + v01 * (1.0 - ty) * tx
                    + v10 * ty * (1.0 - tx)
                    + v11 * ty * tx;
                acc[i * w + j] += weight * v;
            }
        }
    }
    let max = acc.iter().copied().fold(f32::MIN, f32::max).max(1e-6);
    let chroma_phase: f32 = rng.gen_range(0.0..std::f32::consts::TAU);
    Array3::from_shape_fn((h, w, 3), |(i, j, c)| {
        let base = acc[i * w + j] / max;
        // brighten nonlinearly so a good fraction exceeds 100 nits
        let lum = PEAK * base.powf(1.5);
        let tint = 1.0 + 0.2 * (base * 9.0 + chroma_phase + c as f32 * 2.0).sin();
        (lum * tint).clamp(0.0, PEAK)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_spans_full_range() {
        let img = make_synthetic_hdr(SynthPattern::Ramp, (32, 48), 7).unwrap();
        let max = img.max_nits();
        let min = img.pixels.iter().copied().fold(f32::MAX, f32::min);
        assert_eq!(max, 1000.0);
        assert_eq!(min, 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        for p in SynthPattern::ALL {
            let a = make_synthetic_hdr(p, (24, 24), 42).unwrap();
            let b = make_synthetic_hdr(p, (24, 24), 42).unwrap();
            assert_eq!(a.pixels, b.pixels, "{p:?}");
            let c = make_synthetic_hdr(p, (24, 24), 43).unwrap();
            assert_ne!(a.pixels, c.pixels, "{p:?} should vary with seed");
        }
    }

    #[test]
    fn highlights_have_bright_fraction() {
        let img = make_synthetic_hdr(SynthPattern::Highlights, (64, 64), 3).unwrap();
        let total = 64 * 64;
        let bright = (0..64)
            .flat_map(|i| (0..64).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let m = img.pixels[[i, j, 0]]
                    .max(img.pixels[[i, j, 1]])
                    .max(img.pixels[[i, j, 2]]);
                m > 500.0
            })
            .count();
        assert!(
            bright as f64 / total as f64 >= 0.05,
            "only {bright}/{total} pixels above 500 nits"
        );
    }

    #[test]
    fn all_patterns_exceed_sdr_white() {
        for p in SynthPattern::ALL {
            let img = make_synthetic_hdr(p, (32, 32), 11).unwrap();
            assert!(img.max_nits() > 100.0, "{p:?} never exceeds 100 nits");
        }
    }

    #[test]
    fn too_small_rejected() {
        assert!(make_synthetic_hdr(SynthPattern::Ramp, (8, 32), 0).is_err());
    }
}
