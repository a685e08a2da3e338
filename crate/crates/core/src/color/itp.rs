//! ICtCp / ITP color difference (Rec. ITU-R BT.2124).
//!
//! Input is linear BT.2020 RGB in absolute nits. The LMS weights and the
//! L'M'S' -> ICtCp matrix use the exact rational coefficients of the
//! recommendation; T is Ct scaled by 0.5.

use super::transfer::pq_encode;
use crate::error::{Error, Result};

/// Linear BT.2020 RGB in nits to (I, T, P).
pub fn rgb_to_itp_pixel(rgb_nits: [f64; 3]) -> Result<[f64; 3]> {
    let [r, g, b] = rgb_nits;
    if rgb_nits.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Numeric(format!(
            "rgb_to_itp requires nonnegative finite nits, got {rgb_nits:?}"
        )));
    }
    let l = (1688.0 * r + 2146.0 * g + 262.0 * b) / 4096.0;
    let m = (683.0 * r + 2951.0 * g + 462.0 * b) / 4096.0;
    let s = (99.0 * r + 309.0 * g + 3688.0 * b) / 4096.0;
    let lp = pq_encode(l.min(10000.0))?;
    let mp = pq_encode(m.min(10000.0))?;
    let sp = pq_encode(s.min(10000.0))?;
    let i = 0.5 * lp + 0.5 * mp;
    let ct = (6610.0 * lp - 13613.0 * mp + 7003.0 * sp) / 4096.0;
    let cp = (17933.0 * lp - 17390.0 * mp - 543.0 * sp) / 4096.0;
    Ok([i, 0.5 * ct, cp])
}

/// Color difference between two linear BT.2020 pixels in nits:
/// `720 * sqrt(dI^2 + dT^2 + dP^2)`.
pub fn delta_e_itp_pixel(a_nits: [f64; 3], b_nits: [f64; 3]) -> Result<f64> {
    let a = rgb_to_itp_pixel(a_nits)?;
    let b = rgb_to_itp_pixel(b_nits)?;
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    Ok(720.0 * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identical_pixels_zero_difference() {
        let p = [123.0, 45.0, 678.0];
        assert_eq!(delta_e_itp_pixel(p, p).unwrap(), 0.0);
    }

    #[test]
    fn black_has_zero_intensity() {
        let itp = rgb_to_itp_pixel([0.0, 0.0, 0.0]).unwrap();
        assert_eq!(itp[0], 0.0);
    }

    #[test]
    fn gray_100_nits_matches_pq() {
        // Achromatic 100 nits: L = M = S = 100, so I = PQ(100).
        let itp = rgb_to_itp_pixel([100.0, 100.0, 100.0]).unwrap();
        assert_abs_diff_eq!(itp[0], 0.5080784215173949, epsilon = 1e-9);
        assert_abs_diff_eq!(itp[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn reference_pairs() {
        // High-precision evaluations of the BT.2124 chain.
        let de = delta_e_itp_pixel([100.0, 100.0, 100.0], [200.0, 200.0, 200.0]).unwrap();
        assert_abs_diff_eq!(de, 51.159473082813303, epsilon = 1e-6);
        assert!(de > 0.0);

        let de2 = delta_e_itp_pixel([120.0, 40.0, 260.0], [90.0, 60.0, 210.0]).unwrap();
        assert_abs_diff_eq!(de2, 38.109506371410575, epsilon = 1e-6);
    }

    #[test]
    fn negative_input_rejected() {
        assert!(rgb_to_itp_pixel([-1.0, 0.0, 0.0]).is_err());
    }
}
