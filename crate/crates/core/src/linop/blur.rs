//! Shift-invariant blur with reflexive boundaries.
//!
//! The image is extended by half-sample symmetry (`x[-1] = x[0]`,
//! `x[n] = x[n-1]`) and correlated with the kernel. Under this extension a
//! doubly symmetric kernel gives a symmetric operator that the orthonormal
//! DCT-II diagonalizes exactly.


use super::psf::Psf;
use crate::error::{Error, Result};
use crate::image::Image;

/// Reflects an out-of-range index back into `0..n` (half-sample symmetric).
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - 1 - m;
    }
    m as usize
}

fn check_kernel_fits(psf: &Psf, img: &Image) -> Result<()> {
    if psf.size() > img.width().min(img.height()) {
        return Err(Error::invalid(format!(
            "psf of size {} does not fit a {}x{} image",
            psf.size(),
            img.width(),
            img.height()
        )));
    }
    Ok(())
}

/// Valid-mode correlation of a `src_w` x `src_h` buffer with `psf`.
fn correlate_valid(src: &[f64], src_w: usize, src_h: usize, psf: &Psf) -> Vec<f64> {
    let k = psf.size();
    let taps = psf.taps();
    let out_w = src_w + 1 - k;
    let out_h = src_h + 1 - k;
    if let Some((column, row)) = psf.factors() {
        return correlate_separable(src, src_w, src_h, column, row);
    }
    let mut out = vec![0.0; out_w * out_h];
    out.chunks_mut(out_w).enumerate().for_each(|(i, row)| {
        for a in 0..k {
            let src_row = &src[(i + a) * src_w..(i + a + 1) * src_w];
            let kern_row = &taps[a * k..(a + 1) * k];
            for (b, &t) in kern_row.iter().enumerate() {
                if t == 0.0 {
                    continue;
                }
                for (o, s) in row.iter_mut().zip(&src_row[b..b + out_w]) {
                    *o += t * s;
                }
            }
        }
    });
    out
}

/// Row pass with `row`, then column pass with `column`.
fn correlate_separable(src: &[f64], src_w: usize, src_h: usize, column: &[f64], row: &[f64]) -> Vec<f64> {
    let k = row.len();
    let out_w = src_w + 1 - k;
    let out_h = src_h + 1 - k;
    let mut tmp = vec![0.0; out_w * src_h];
    for (dst, src_row) in tmp.chunks_mut(out_w).zip(src.chunks(src_w)) {
        for (b, &t) in row.iter().enumerate() {
            for (o, s) in dst.iter_mut().zip(&src_row[b..b + out_w]) {
                *o += t * s;
            }
        }
    }
    let mut out = vec![0.0; out_w * out_h];
    for (i, dst) in out.chunks_mut(out_w).enumerate() {
        for (a, &t) in column.iter().enumerate() {
            for (o, s) in dst.iter_mut().zip(&tmp[(i + a) * out_w..(i + a + 1) * out_w]) {
                *o += t * s;
            }
        }
    }
    out
}

/// Source index of every position in `-r..n + r`.
fn reflect_map(n: usize, r: usize) -> Vec<usize> {
    (0..n + 2 * r).map(|i| reflect(i as isize - r as isize, n)).collect()
}

fn pad_reflect(x: &Image, r: usize) -> Vec<f64> {
    let (w, h) = x.dims();
    let pw = w + 2 * r;
    let src = x.as_slice();
    let cols = reflect_map(w, r);
    let mut out = vec![0.0; pw * (h + 2 * r)];
    for (row, &si) in out.chunks_mut(pw).zip(&reflect_map(h, r)) {
        let src_row = &src[si * w..(si + 1) * w];
        for (v, &j) in row.iter_mut().zip(&cols) {
            *v = src_row[j];
        }
    }
    out
}

/// Applies the blur operator `A`.
pub fn blur_apply(psf: &Psf, x: &Image) -> Result<Image> {
    check_kernel_fits(psf, x)?;
    let r = psf.radius();
    let (w, h) = x.dims();
    if r == 0 {
        let t = psf.taps()[0];
        return Ok(x.scale(t));
    }
    let padded = pad_reflect(x, r);
    let out = correlate_valid(&padded, w + 2 * r, h + 2 * r, psf);
    Ok(Image::from_raw(w, h, out))
}

/// Applies `A^T`, the exact adjoint of [`blur_apply`] including the
/// reflected boundary contributions.
pub fn blur_adjoint(psf: &Psf, y: &Image) -> Result<Image> {
    check_kernel_fits(psf, y)?;
    let r = psf.radius();
    let (w, h) = y.dims();
    if r == 0 {
        let t = psf.taps()[0];
        return Ok(y.scale(t));
    }
    // A = C P with P the reflect-padding and C the valid correlation.
    // C^T y is a full correlation with the flipped kernel on zero-padded y.
    let zw = w + 4 * r;
    let zh = h + 4 * r;
    let mut zero_padded = vec![0.0; zw * zh];
    for (i, row) in y.as_slice().chunks(w).enumerate() {
        let dst = (i + 2 * r) * zw + 2 * r;
        zero_padded[dst..dst + w].copy_from_slice(row);
    }
    let flipped = psf.flipped();
    let full = correlate_valid(&zero_padded, zw, zh, &flipped);

    // P^T folds every padded position back onto the pixel it copied.
    let pw = w + 2 * r;
    let cols = reflect_map(w, r);
    let mut out = vec![0.0; w * h];
    for (row, &oi) in full.chunks(pw).zip(&reflect_map(h, r)) {
        let out_row = &mut out[oi * w..(oi + 1) * w];
        out_row.iter_mut().zip(&row[r..r + w]).for_each(|(o, v)| *o += v);
        for (j, &v) in row[..r].iter().chain(&row[r + w..]).enumerate() {
            let col = if j < r { cols[j] } else { cols[j + w] };
            out_row[col] += v;
        }
    }
    Ok(Image::from_raw(w, h, out))
}

/// `A^T (A x - b)`, the gradient of `0.5 * ||A x - b||^2`.
pub fn gradient(psf: &Psf, x: &Image, b: &Image) -> Result<Image> {
    x.same_dims(b)?;
    let residual = blur_apply(psf, x)?.sub(b);
    blur_adjoint(psf, &residual)
}

/// `A^T A x`
pub fn normal_apply(psf: &Psf, x: &Image) -> Result<Image> {
    blur_adjoint(psf, &blur_apply(psf, x)?)
}

/// `0.5 * ||A x - b||^2`
pub fn data_fidelity(psf: &Psf, x: &Image, b: &Image) -> Result<f64> {
    x.same_dims(b)?;
    Ok(0.5 * blur_apply(psf, x)?.sub(b).norm_sq())
}
