//! Raster containers and file formats.
//!
//! Three in-memory forms move through the pipeline:
//! - [`LinearImage`]: scene-linear RGB in absolute nits (HDR sources),
//! - [`EncodedImage`]: nonlinearly encoded RGB in [0,1] (SDR inputs and
//!   PQ outputs),
//! - [`YCbCrImage`]: full-range luma plus zero-centered chroma planes.
//!
//! On disk, linear HDR images are planar little-endian f32 with a JSON
//! sidecar; encoded images are 16-bit PNG (encoding metadata travels in
//! the dataset manifest, since PNG carries no HDR tags).

use crate::color::{self, ColorEncoding, Primaries};
use crate::error::{Error, Result};
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

/// Scene-linear RGB raster in absolute nits.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearImage {
    /// (H, W, 3), nonnegative nits.
    pub pixels: Array3<f32>,
    pub primaries: Primaries,
}

impl LinearImage {
    pub fn new(pixels: Array3<f32>, primaries: Primaries) -> Result<Self> {
        if pixels.shape()[2] != 3 {
            return Err(Error::Shape(format!(
                "LinearImage needs 3 channels, got {}",
                pixels.shape()[2]
            )));
        }
        if pixels.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Numeric(
                "LinearImage pixels must be finite and nonnegative".into(),
            ));
        }
        Ok(LinearImage { pixels, primaries })
    }

    pub fn height(&self) -> usize {
        self.pixels.shape()[0]
    }

    pub fn width(&self) -> usize {
        self.pixels.shape()[1]
    }

    pub fn max_nits(&self) -> f32 {
        self.pixels.iter().copied().fold(0.0, f32::max)
    }
}

/// Nonlinearly encoded RGB raster with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedImage {
    /// (H, W, 3) in [0, 1].
    pub pixels: Array3<f32>,
    pub encoding: ColorEncoding,
}

impl EncodedImage {
    pub fn new(pixels: Array3<f32>, encoding: ColorEncoding) -> Result<Self> {
        encoding.validate()?;
        if pixels.shape()[2] != 3 {
            return Err(Error::Shape(format!(
                "EncodedImage needs 3 channels, got {}",
                pixels.shape()[2]
            )));
        }
        if pixels.iter().any(|v| !v.is_finite() || !(0.0..=1.0).contains(v)) {
            return Err(Error::Numeric(
                "EncodedImage pixels must lie in [0, 1]".into(),
            ));
        }
        Ok(EncodedImage { pixels, encoding })
    }

    pub fn height(&self) -> usize {
        self.pixels.shape()[0]
    }

    pub fn width(&self) -> usize {
        self.pixels.shape()[1]
    }

    /// Crops a window; panics if out of bounds (callers validate sizes).
    pub fn crop(&self, top: usize, left: usize, h: usize, w: usize) -> EncodedImage {
        EncodedImage {
            pixels: self
                .pixels
                .slice(ndarray::s![top..top + h, left..left + w, ..])
                .to_owned(),
            encoding: self.encoding,
        }
    }
}

/// Luma plane plus zero-centered chroma planes.
#[derive(Debug, Clone, PartialEq)]
pub struct YCbCrImage {
    pub y: Array2<f32>,
    pub cb: Array2<f32>,
    pub cr: Array2<f32>,
}

impl YCbCrImage {
    pub fn height(&self) -> usize {
        self.y.shape()[0]
    }

    pub fn width(&self) -> usize {
        self.y.shape()[1]
    }

    pub fn same_shape(&self, other: &YCbCrImage) -> bool {
        self.y.shape() == other.y.shape()
    }
}

/// Decomposes an encoded image into full-range YCbCr planes.
///
/// BT.709 luma weights are used for every SDR-domain decomposition.
/// Achromatic pixels produce chroma that is exactly 0.0.
pub fn rgb_to_ycbcr(img: &EncodedImage) -> YCbCrImage {
    let (h, w) = (img.height(), img.width());
    let mut y = Array2::zeros((h, w));
    let mut cb = Array2::zeros((h, w));
    let mut cr = Array2::zeros((h, w));
    for i in 0..h {
        for j in 0..w {
            let rgb = [
                img.pixels[[i, j, 0]] as f64,
                img.pixels[[i, j, 1]] as f64,
                img.pixels[[i, j, 2]] as f64,
            ];
            let ycc = color::rgb_to_ycbcr_pixel(rgb);
            y[[i, j]] = ycc[0] as f32;
            cb[[i, j]] = ycc[1] as f32;
            cr[[i, j]] = ycc[2] as f32;
        }
    }
    YCbCrImage { y, cb, cr }
}

/// Reassembles RGB from YCbCr planes, clamping to [0, 1].
///
/// Clamping matters for composed planes (channel swaps) that can leave
/// the RGB gamut; honest round trips stay within 1e-6 per channel.
pub fn ycbcr_to_rgb(ycc: &YCbCrImage, encoding: ColorEncoding) -> Result<EncodedImage> {
    let (h, w) = (ycc.height(), ycc.width());
    let mut pixels = Array3::zeros((h, w, 3));
    for i in 0..h {
        for j in 0..w {
            let rgb = color::ycbcr_to_rgb_pixel([
                ycc.y[[i, j]] as f64,
                ycc.cb[[i, j]] as f64,
                ycc.cr[[i, j]] as f64,
            ]);
            for c in 0..3 {
                pixels[[i, j, c]] = rgb[c].clamp(0.0, 1.0) as f32;
            }
        }
    }
    EncodedImage::new(pixels, encoding)
}

/// Sidecar metadata for raw linear images.
#[derive(Debug, Serialize, Deserialize)]
pub struct RawSidecar {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub primaries: Primaries,
    pub peak_nits: f64,
}

/// Writes a linear image as planar little-endian f32 plus a `.json` sidecar.
pub fn write_linear_raw(path: &Path, img: &LinearImage, peak_nits: f64) -> Result<()> {
    let (h, w) = (img.height(), img.width());
    let mut out = BufWriter::new(File::create(path)?);
    for c in 0..3 {
        for i in 0..h {
            for j in 0..w {
                out.write_f32::<LittleEndian>(img.pixels[[i, j, c]])?;
            }
        }
    }
    out.flush()?;
    let sidecar = RawSidecar {
        width: w,
        height: h,
        channels: 3,
        primaries: img.primaries,
        peak_nits,
    };
    let json = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(sidecar_path(path), json)?;
    Ok(())
}

/// Reads a planar f32 raw image and its sidecar.
pub fn read_linear_raw(path: &Path) -> Result<(LinearImage, RawSidecar)> {
    let text = std::fs::read_to_string(sidecar_path(path)).map_err(|e| {
        Error::Data(format!("missing sidecar for {}: {e}", path.display()))
    })?;
    let sidecar: RawSidecar = serde_json::from_str(&text)?;
    if sidecar.channels != 3 {
        return Err(Error::Data(format!(
            "raw image {} must have 3 channels, sidecar says {}",
            path.display(),
            sidecar.channels
        )));
    }
    let (h, w) = (sidecar.height, sidecar.width);
    let mut reader = BufReader::new(File::open(path)?);
    let mut pixels = Array3::zeros((h, w, 3));
    for c in 0..3 {
        for i in 0..h {
            for j in 0..w {
                pixels[[i, j, c]] = reader.read_f32::<LittleEndian>().map_err(|e| {
                    Error::Data(format!("truncated raw image {}: {e}", path.display()))
                })?;
            }
        }
    }
    let img = LinearImage::new(pixels, sidecar.primaries)?;
    Ok((img, sidecar))
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    std::path::PathBuf::from(os)
}

/// Writes an encoded image as 16-bit RGB PNG.
pub fn write_png16(path: &Path, img: &EncodedImage) -> Result<()> {
    let (h, w) = (img.height(), img.width());
    let mut buf: Vec<u16> = Vec::with_capacity(h * w * 3);
    for i in 0..h {
        for j in 0..w {
            for c in 0..3 {
                let v = (img.pixels[[i, j, c]] as f64 * 65535.0).round();
                buf.push(v.clamp(0.0, 65535.0) as u16);
            }
        }
    }
    let img_buf = image::ImageBuffer::<image::Rgb<u16>, Vec<u16>>::from_raw(w as u32, h as u32, buf)
        .ok_or_else(|| Error::Data("png buffer size mismatch".into()))?;
    image::DynamicImage::ImageRgb16(img_buf)
        .save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

/// Reads a 16-bit RGB PNG as an encoded image with the given encoding tag.
pub fn read_png16(path: &Path, encoding: ColorEncoding) -> Result<EncodedImage> {
    let dynimg = image::open(path)?;
    let rgb16 = dynimg.to_rgb16();
    let (w, h) = (rgb16.width() as usize, rgb16.height() as usize);
    let mut pixels = Array3::zeros((h, w, 3));
    for (j, i, px) in rgb16.enumerate_pixels() {
        for c in 0..3 {
            pixels[[i as usize, j as usize, c]] = px.0[c] as f32 / 65535.0;
        }
    }
    EncodedImage::new(pixels, encoding)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array3;

    fn gradient_encoded(h: usize, w: usize) -> EncodedImage {
        let pixels = Array3::from_shape_fn((h, w, 3), |(i, j, c)| {
            ((i * w + j) as f32 / (h * w) as f32 + c as f32 * 0.1).min(1.0)
        });
        EncodedImage::new(pixels, ColorEncoding::sdr()).unwrap()
    }

    #[test]
    fn ycbcr_gray_image_zero_chroma() {
        let pixels = Array3::from_elem((4, 5, 3), 0.5f32);
        let img = EncodedImage::new(pixels, ColorEncoding::sdr()).unwrap();
        let ycc = rgb_to_ycbcr(&img);
        assert!(ycc.cb.iter().all(|&v| v == 0.0));
        assert!(ycc.cr.iter().all(|&v| v == 0.0));
        assert!(ycc.y.iter().all(|&v| (v - 0.5).abs() < 1e-6));
    }

    #[test]
    fn ycbcr_round_trip_within_budget() {
        let img = gradient_encoded(8, 9);
        let ycc = rgb_to_ycbcr(&img);
        let back = ycbcr_to_rgb(&ycc, img.encoding).unwrap();
        for (a, b) in img.pixels.iter().zip(back.pixels.iter()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn raw_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.f32");
        let pixels = Array3::from_shape_fn((6, 7, 3), |(i, j, c)| {
            ((i * 31 + j * 7 + c * 3) as f32 * 1.73).fract() * 900.0
        });
        let img = LinearImage::new(pixels, Primaries::Bt2020).unwrap();
        write_linear_raw(&path, &img, 1000.0).unwrap();
        let (back, sidecar) = read_linear_raw(&path).unwrap();
        assert_eq!(img.pixels, back.pixels);
        assert_eq!(sidecar.peak_nits, 1000.0);
        assert_eq!(sidecar.primaries, Primaries::Bt2020);
    }

    #[test]
    fn png16_round_trip_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.png");
        let img = gradient_encoded(5, 4);
        write_png16(&path, &img).unwrap();
        let back = read_png16(&path, img.encoding).unwrap();
        for (a, b) in img.pixels.iter().zip(back.pixels.iter()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-7);
        }
    }

    #[test]
    fn invalid_pixels_rejected() {
        let mut pixels = Array3::zeros((2, 2, 3));
        pixels[[0, 0, 0]] = 1.5;
        assert!(EncodedImage::new(pixels, ColorEncoding::sdr()).is_err());
        let mut neg = Array3::zeros((2, 2, 3));
        neg[[1, 1, 2]] = -0.1;
        assert!(LinearImage::new(neg, Primaries::Bt2020).is_err());
    }
}
