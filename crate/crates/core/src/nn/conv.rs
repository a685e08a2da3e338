//! im2col-based 2-D convolution kernels (forward and backward).
//!
//! Batch samples are processed in parallel; each sample's GEMM is
//! sequential, so results are bitwise deterministic regardless of the
//! thread schedule. Weight gradients are reduced over the batch in index
//! order for the same reason.

use ndarray::{Array2, Array4, ArrayView2, ArrayView4, Axis};
use rayon::prelude::*;

/// Output spatial size for a same/valid conv configuration.
pub fn conv_out_dim(input: usize, kernel: usize, stride: usize, pad: usize) -> usize {
    (input + 2 * pad - kernel) / stride + 1
}

/// `a @ b`, optionally through f32 accumulation for speed.
fn gemm(a: ArrayView2<f64>, b: ArrayView2<f64>, f32_gemm: bool) -> Array2<f64> {
    if f32_gemm {
        let a32 = a.mapv(|v| v as f32);
        let b32 = b.mapv(|v| v as f32);
        a32.dot(&b32).mapv(|v| v as f64)
    } else {
        a.dot(&b)
    }
}

/// Unfolds one (C, H, W) sample into a (C*kh*kw, oh*ow) column matrix.
fn im2col(
    x: &ArrayView4<f64>,
    n: usize,
    kh: usize,
    kw: usize,
    stride: usize,
    pad: usize,
    oh: usize,
    ow: usize,
) -> Array2<f64> {
    let (_, c, h, w) = x.dim();
    let mut col = Array2::zeros((c * kh * kw, oh * ow));
    for ci in 0..c {
        for ki in 0..kh {
            for kj in 0..kw {
                let row = (ci * kh + ki) * kw + kj;
                for oi in 0..oh {
                    let ii = (oi * stride + ki) as isize - pad as isize;
                    if ii < 0 || ii >= h as isize {
                        continue;
                    }
                    for oj in 0..ow {
                        let jj = (oj * stride + kj) as isize - pad as isize;
                        if jj < 0 || jj >= w as isize {
                            continue;
                        }
                        col[[row, oi * ow + oj]] = x[[n, ci, ii as usize, jj as usize]];
                    }
                }
            }
        }
    }
    col
}

/// Folds a (C*kh*kw, oh*ow) column gradient back onto an input gradient.
fn col2im_accumulate(
    dcol: &Array2<f64>,
    dx: &mut ndarray::ArrayViewMut3<f64>,
    kh: usize,
    kw: usize,
    stride: usize,
    pad: usize,
    oh: usize,
    ow: usize,
) {
    let (c, h, w) = dx.dim();
    for ci in 0..c {
        for ki in 0..kh {
            for kj in 0..kw {
                let row = (ci * kh + ki) * kw + kj;
                for oi in 0..oh {
                    let ii = (oi * stride + ki) as isize - pad as isize;
                    if ii < 0 || ii >= h as isize {
                        continue;
                    }
                    for oj in 0..ow {
                        let jj = (oj * stride + kj) as isize - pad as isize;
                        if jj < 0 || jj >= w as isize {
                            continue;
                        }
                        dx[[ci, ii as usize, jj as usize]] += dcol[[row, oi * ow + oj]];
                    }
                }
            }
        }
    }
}

/// Forward convolution: x (N,C,H,W), w (O,C,kh,kw), bias (O) -> (N,O,oh,ow).
pub fn conv2d_forward(
    x: &ArrayView4<f64>,
    w: &ArrayView4<f64>,
    bias: Option<&[f64]>,
    stride: usize,
    pad: usize,
    f32_gemm: bool,
) -> Array4<f64> {
    let (n, _, h, wd) = x.dim();
    let (o, c, kh, kw) = w.dim();
    let oh = conv_out_dim(h, kh, stride, pad);
    let ow = conv_out_dim(wd, kw, stride, pad);
    let w2 = w
        .to_shape((o, c * kh * kw))
        .expect("contiguous weight")
        .to_owned();
    let mut out = Array4::zeros((n, o, oh, ow));
    let samples: Vec<usize> = (0..n).collect();
    let results: Vec<Array2<f64>> = samples
        .par_iter()
        .map(|&ni| {
            let col = im2col(x, ni, kh, kw, stride, pad, oh, ow);
            gemm(w2.view(), col.view(), f32_gemm)
        })
        .collect();
    for (ni, res) in results.into_iter().enumerate() {
        let mut out_n = out.index_axis_mut(Axis(0), ni);
        for oi in 0..o {
            let b = bias.map(|b| b[oi]).unwrap_or(0.0);
            for s in 0..oh * ow {
                out_n[[oi, s / ow, s % ow]] = res[[oi, s]] + b;
            }
        }
    }
    out
}

/// Gradients of the forward convolution.
///
/// Returns (dx, dw, db). The column matrices are recomputed rather than
/// cached; GEMM dominates the cost either way.
pub fn conv2d_backward(
    x: &ArrayView4<f64>,
    w: &ArrayView4<f64>,
    dy: &ArrayView4<f64>,
    has_bias: bool,
    stride: usize,
    pad: usize,
    f32_gemm: bool,
) -> (Array4<f64>, Array4<f64>, Option<Vec<f64>>) {
    let (n, c, h, wd) = x.dim();
    let (o, _, kh, kw) = w.dim();
    let (_, _, oh, ow) = dy.dim();
    let w2 = w
        .to_shape((o, c * kh * kw))
        .expect("contiguous weight")
        .to_owned();

    struct SampleGrads {
        dx: ndarray::Array3<f64>,
        dw: Array2<f64>,
    }

    let per_sample: Vec<SampleGrads> = (0..n)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&ni| {
            let col = im2col(x, ni, kh, kw, stride, pad, oh, ow);
            let dy_n = dy
                .index_axis(Axis(0), ni)
                .to_shape((o, oh * ow))
                .expect("contiguous grad")
                .to_owned();
            // dW_n = dY_n @ col^T ; dcol = W^T @ dY_n
            let dw = gemm(dy_n.view(), col.t(), f32_gemm);
            let dcol = gemm(w2.t(), dy_n.view(), f32_gemm);
            let mut dx = ndarray::Array3::zeros((c, h, wd));
            col2im_accumulate(&dcol, &mut dx.view_mut(), kh, kw, stride, pad, oh, ow);
            SampleGrads { dx, dw }
        })
        .collect();

    let mut dx = Array4::zeros((n, c, h, wd));
    let mut dw2 = Array2::zeros((o, c * kh * kw));
    for (ni, g) in per_sample.into_iter().enumerate() {
        dx.index_axis_mut(Axis(0), ni).assign(&g.dx);
        dw2 += &g.dw;
    }
    let dw = dw2
        .into_shape_with_order((o, c, kh, kw))
        .expect("weight grad shape");

    let db = if has_bias {
        let mut db = vec![0.0; o];
        for ni in 0..n {
            for oi in 0..o {
                for i in 0..oh {
                    for j in 0..ow {
                        db[oi] += dy[[ni, oi, i, j]];
                    }
                }
            }
        }
        Some(db)
    } else {
        None
    };
    (dx, dw, db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array4;

    /// Direct quadruple-loop convolution used as an oracle.
    fn conv_naive(
        x: &Array4<f64>,
        w: &Array4<f64>,
        bias: Option<&[f64]>,
        stride: usize,
        pad: usize,
    ) -> Array4<f64> {
        let (n, c, h, wd) = x.dim();
        let (o, _, kh, kw) = w.dim();
        let oh = conv_out_dim(h, kh, stride, pad);
        let ow = conv_out_dim(wd, kw, stride, pad);
        let mut out = Array4::zeros((n, o, oh, ow));
        for ni in 0..n {
            for oi in 0..o {
                for y in 0..oh {
                    for xo in 0..ow {
                        let mut acc = bias.map(|b| b[oi]).unwrap_or(0.0);
                        for ci in 0..c {
                            for ki in 0..kh {
                                for kj in 0..kw {
                                    let ii = (y * stride + ki) as isize - pad as isize;
                                    let jj = (xo * stride + kj) as isize - pad as isize;
                                    if ii >= 0 && jj >= 0 && (ii as usize) < h && (jj as usize) < wd
                                    {
                                        acc += x[[ni, ci, ii as usize, jj as usize]]
                                            * w[[oi, ci, ki, kj]];
                                    }
                                }
                            }
                        }
                        out[[ni, oi, y, xo]] = acc;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_conv() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(1);
        let x = Array4::from_shape_fn((2, 3, 6, 5), |_| rng.gen::<f64>() - 0.5);
        let w = Array4::from_shape_fn((4, 3, 3, 3), |_| rng.gen::<f64>() - 0.5);
        let b: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
        let fast = conv2d_forward(&x.view(), &w.view(), Some(&b), 1, 1, false);
        let slow = conv_naive(&x, &w, Some(&b), 1, 1);
        for (a, e) in fast.iter().zip(slow.iter()) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn backward_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2);
        let x = Array4::from_shape_fn((1, 2, 4, 4), |_| rng.gen::<f64>() - 0.5);
        let w = Array4::from_shape_fn((3, 2, 3, 3), |_| rng.gen::<f64>() - 0.5);
        let b: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();

        // loss = sum(conv(x))
        let y = conv2d_forward(&x.view(), &w.view(), Some(&b), 1, 1, false);
        let dy = Array4::ones(y.dim());
        let (dx, dw, db) =
            conv2d_backward(&x.view(), &w.view(), &dy.view(), true, 1, 1, false);

        let eps = 1e-6;
        let loss = |x: &Array4<f64>, w: &Array4<f64>, b: &[f64]| -> f64 {
            conv2d_forward(&x.view(), &w.view(), Some(b), 1, 1, false).sum()
        };
        // probe a few coordinates of each gradient
        for &idx in &[(0usize, 0usize, 0usize, 0usize), (0, 1, 2, 3), (0, 1, 3, 1)] {
            let mut xp = x.clone();
            xp[idx] += eps;
            let mut xm = x.clone();
            xm[idx] -= eps;
            let fd = (loss(&xp, &w, &b) - loss(&xm, &w, &b)) / (2.0 * eps);
            assert!((fd - dx[idx]).abs() < 1e-5, "dx {idx:?}: fd={fd} an={}", dx[idx]);
        }
        for &idx in &[(0usize, 0usize, 0usize, 0usize), (2, 1, 2, 2)] {
            let mut wp = w.clone();
            wp[idx] += eps;
            let mut wm = w.clone();
            wm[idx] -= eps;
            let fd = (loss(&x, &wp, &b) - loss(&x, &wm, &b)) / (2.0 * eps);
            assert!((fd - dw[idx]).abs() < 1e-5);
        }
        let db = db.unwrap();
        let mut bp = b.clone();
        bp[1] += eps;
        let mut bm = b.clone();
        bm[1] -= eps;
        let fd = (loss(&x, &w, &bp) - loss(&x, &w, &bm)) / (2.0 * eps);
        assert!((fd - db[1]).abs() < 1e-5);
    }

    #[test]
    fn one_by_one_conv_is_channel_mix() {
        let x = Array4::from_shape_fn((1, 2, 2, 2), |(_, c, i, j)| (c * 4 + i * 2 + j) as f64);
        let w = Array4::from_shape_fn((1, 2, 1, 1), |(_, c, _, _)| if c == 0 { 2.0 } else { 3.0 });
        let y = conv2d_forward(&x.view(), &w.view(), None, 1, 0, false);
        for i in 0..2 {
            for j in 0..2 {
                let expect = 2.0 * x[[0, 0, i, j]] + 3.0 * x[[0, 1, i, j]];
                assert_eq!(y[[0, 0, i, j]], expect);
            }
        }
    }
}
