//! RGB primary conversion between BT.709 and BT.2020.
//!
//! Matrices are derived at runtime in f64 from the published chromaticity
//! coordinates and the D65 white point, so white-point preservation and
//! inverse round-trips hold to machine precision instead of to the four
//! decimal places of tabulated matrices.

use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// RGB primary set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primaries {
    Bt709,
    Bt2020,
}

// (x, y) chromaticities: R, G, B, white (D65).
const BT709_XY: [[f64; 2]; 4] = [
    [0.640, 0.330],
    [0.300, 0.600],
    [0.150, 0.060],
    [0.3127, 0.3290],
];
const BT2020_XY: [[f64; 2]; 4] = [
    [0.708, 0.292],
    [0.170, 0.797],
    [0.131, 0.046],
    [0.3127, 0.3290],
];

type Mat3 = [[f64; 3]; 3];

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

fn mat_inv(m: &Mat3) -> Mat3 {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let inv_det = 1.0 / det;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let a = m[(i + 1) % 3][(j + 1) % 3] * m[(i + 2) % 3][(j + 2) % 3]
                - m[(i + 1) % 3][(j + 2) % 3] * m[(i + 2) % 3][(j + 1) % 3];
            // adjugate transpose
            out[j][i] = a * inv_det;
        }
    }
    out
}

/// RGB -> XYZ for a primary set, normalized so (1,1,1) maps to the white XYZ.
fn rgb_to_xyz(xy: &[[f64; 2]; 4]) -> Mat3 {
    let col = |x: f64, y: f64| [x / y, 1.0, (1.0 - x - y) / y];
    let r = col(xy[0][0], xy[0][1]);
    let g = col(xy[1][0], xy[1][1]);
    let b = col(xy[2][0], xy[2][1]);
    let w = col(xy[3][0], xy[3][1]);
    let m: Mat3 = [[r[0], g[0], b[0]], [r[1], g[1], b[1]], [r[2], g[2], b[2]]];
    let m_inv = mat_inv(&m);
    let mut scale = [0.0; 3];
    for i in 0..3 {
        scale[i] = m_inv[i][0] * w[0] + m_inv[i][1] * w[1] + m_inv[i][2] * w[2];
    }
    let mut out = m;
    for row in out.iter_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= scale[j];
        }
    }
    out
}

fn xyz_matrix(p: Primaries) -> Mat3 {
    match p {
        Primaries::Bt709 => rgb_to_xyz(&BT709_XY),
        Primaries::Bt2020 => rgb_to_xyz(&BT2020_XY),
    }
}

/// Linear RGB conversion matrix from `src` to `dst` primaries.
///
/// Identity when `src == dst`; derived as XYZ(dst)^-1 * XYZ(src) otherwise.
pub fn gamut_matrix(src: Primaries, dst: Primaries) -> &'static Mat3 {
    static ID: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    static TO_2020: OnceLock<Mat3> = OnceLock::new();
    static TO_709: OnceLock<Mat3> = OnceLock::new();
    match (src, dst) {
        (a, b) if a == b => &ID,
        (Primaries::Bt709, Primaries::Bt2020) => TO_2020.get_or_init(|| {
            mat_mul(&mat_inv(&xyz_matrix(Primaries::Bt2020)), &xyz_matrix(Primaries::Bt709))
        }),
        (Primaries::Bt2020, Primaries::Bt709) => TO_709.get_or_init(|| {
            mat_mul(&mat_inv(&xyz_matrix(Primaries::Bt709)), &xyz_matrix(Primaries::Bt2020))
        }),
        _ => unreachable!(),
    }
}

/// Converts one linear RGB triple between primary sets. No clipping.
pub fn gamut_convert_pixel(rgb: [f64; 3], src: Primaries, dst: Primaries) -> [f64; 3] {
    let m = gamut_matrix(src, dst);
    [
        m[0][0] * rgb[0] + m[0][1] * rgb[1] + m[0][2] * rgb[2],
        m[1][0] * rgb[0] + m[1][1] * rgb[1] + m[1][2] * rgb[2],
        m[2][0] * rgb[0] + m[2][1] * rgb[1] + m[2][2] * rgb[2],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn white_and_black_preserved() {
        for (src, dst) in [
            (Primaries::Bt709, Primaries::Bt2020),
            (Primaries::Bt2020, Primaries::Bt709),
        ] {
            let w = gamut_convert_pixel([1.0, 1.0, 1.0], src, dst);
            for c in w {
                assert_abs_diff_eq!(c, 1.0, epsilon = 1e-12);
            }
            let k = gamut_convert_pixel([0.0, 0.0, 0.0], src, dst);
            assert_eq!(k, [0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn red_round_trip() {
        let red_2020 = gamut_convert_pixel([1.0, 0.0, 0.0], Primaries::Bt709, Primaries::Bt2020);
        let back = gamut_convert_pixel(red_2020, Primaries::Bt2020, Primaries::Bt709);
        assert_abs_diff_eq!(back[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(back[1], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(back[2], 0.0, epsilon = 1e-6);
    }

    #[test]
    fn matches_published_values() {
        // BT.2087 table, 4 decimal places.
        let m = gamut_matrix(Primaries::Bt709, Primaries::Bt2020);
        let published = [
            [0.6274, 0.3293, 0.0433],
            [0.0691, 0.9195, 0.0114],
            [0.0164, 0.0880, 0.8956],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(m[i][j], published[i][j], epsilon = 5e-4);
            }
        }
    }

    #[test]
    fn bt709_cube_contained_in_bt2020() {
        // BT.709 is a strict subset of BT.2020, so all corners stay in [0,1].
        for idx in 0..8 {
            let rgb = [
                (idx & 1) as f64,
                ((idx >> 1) & 1) as f64,
                ((idx >> 2) & 1) as f64,
            ];
            let out = gamut_convert_pixel(rgb, Primaries::Bt709, Primaries::Bt2020);
            for c in out {
                assert!((-1e-12..=1.0 + 1e-12).contains(&c), "{rgb:?} -> {out:?}");
            }
        }
    }
}
