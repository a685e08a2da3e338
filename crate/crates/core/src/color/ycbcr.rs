//! Full-range BT.709 YCbCr with zero-centered chroma.
//!
//! Chroma is computed in difference form, `cb = (kr*(b-r) + kg*(b-g)) / 1.8556`,
//! rather than `(b - y) / 1.8556`. The two are algebraically identical, but the
//! difference form makes achromatic inputs produce chroma that is exactly 0.0
//! in floating point, which downstream channel-swap invariants rely on.

/// BT.709 luma weights.
pub const LUMA_R: f64 = 0.2126;
pub const LUMA_G: f64 = 0.7152;
pub const LUMA_B: f64 = 0.0722;

const CB_DENOM: f64 = 2.0 * (1.0 - LUMA_B); // 1.8556
const CR_DENOM: f64 = 2.0 * (1.0 - LUMA_R); // 1.5748

/// RGB in [0,1] to (y, cb, cr) with y in [0,1] and cb, cr in [-0.5, 0.5].
#[inline]
pub fn rgb_to_ycbcr_pixel(rgb: [f64; 3]) -> [f64; 3] {
    let [r, g, b] = rgb;
    let y = LUMA_R * r + LUMA_G * g + LUMA_B * b;
    let cb = (LUMA_R * (b - r) + LUMA_G * (b - g)) / CB_DENOM;
    let cr = (LUMA_G * (r - g) + LUMA_B * (r - b)) / CR_DENOM;
    [y, cb, cr]
}

/// Inverse of [`rgb_to_ycbcr_pixel`]. No clamping; callers clamp if the
/// (possibly composed) YCbCr triple leaves the RGB gamut.
#[inline]
pub fn ycbcr_to_rgb_pixel(ycc: [f64; 3]) -> [f64; 3] {
    let [y, cb, cr] = ycc;
    let r = y + CR_DENOM * cr;
    let b = y + CB_DENOM * cb;
    let g = (y - LUMA_R * r - LUMA_B * b) / LUMA_G;
    [r, g, b]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn achromatic_chroma_is_exact_zero() {
        for &v in &[0.0, 0.1, 0.25, 0.5, 0.73, 1.0, 1.0 / 3.0] {
            let [y, cb, cr] = rgb_to_ycbcr_pixel([v, v, v]);
            assert_eq!(cb, 0.0);
            assert_eq!(cr, 0.0);
            assert_abs_diff_eq!(y, v, epsilon = 1e-15);
        }
    }

    #[test]
    fn white_maps_to_unit_luma() {
        let [y, cb, cr] = rgb_to_ycbcr_pixel([1.0, 1.0, 1.0]);
        assert_abs_diff_eq!(y, 1.0, epsilon = 1e-15);
        assert_eq!((cb, cr), (0.0, 0.0));
    }

    #[test]
    fn pure_red_matches_standard_matrix() {
        // Independently evaluated from the BT.709 coefficients.
        let [y, cb, cr] = rgb_to_ycbcr_pixel([1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(y, 0.2126, epsilon = 1e-12);
        assert_abs_diff_eq!(cb, -0.11457210605733994, epsilon = 1e-12);
        assert_abs_diff_eq!(cr, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn round_trip() {
        let cases = [
            [0.1, 0.9, 0.4],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.33, 0.33, 0.34],
        ];
        for rgb in cases {
            let back = ycbcr_to_rgb_pixel(rgb_to_ycbcr_pixel(rgb));
            for i in 0..3 {
                assert_abs_diff_eq!(back[i], rgb[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn chroma_stays_in_half_range() {
        // extremes of each channel
        for idx in 0..8 {
            let rgb = [
                (idx & 1) as f64,
                ((idx >> 1) & 1) as f64,
                ((idx >> 2) & 1) as f64,
            ];
            let [_, cb, cr] = rgb_to_ycbcr_pixel(rgb);
            assert!((-0.5..=0.5).contains(&cb));
            assert!((-0.5..=0.5).contains(&cr));
        }
    }
}
