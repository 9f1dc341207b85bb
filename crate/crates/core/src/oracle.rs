//! Dense reference implementations for tiny images.
//!
//! Nothing here calls the fast operators it is used to check: the blur is
//! direct summation, the wavelet is built from the published CDF 9/7 filter
//! taps, and `W_n` is the literal binomial polynomial in `A^T A`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::linop::Psf;

/// Largest image (in pixels) the oracle will densify.
pub const MAX_PIXELS: usize = 256;

/// Analysis lowpass taps `h[0..=4]`, symmetric about 0.
pub const CDF97_LOWPASS: [f64; 5] = [
    0.852_698_679_009_403,
    0.377_402_855_612_654,
    -0.110_624_404_418_423,
    -0.023_849_465_019_380,
    0.037_828_455_506_995,
];

/// Analysis highpass taps `g[0..=3]`, symmetric about each odd sample.
pub const CDF97_HIGHPASS: [f64; 4] = [
    0.788_485_616_405_665,
    -0.418_092_273_222_212,
    -0.040_689_417_609_558,
    0.064_538_882_628_938,
];

/// An explicit matrix acting on row-major flattened images.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    pub fn transpose(&self) -> DenseOperator {
        DenseOperator {
            matrix: self.matrix.transpose(),
        }
    }

    /// `A^T A`
    pub fn gram(&self) -> DMatrix<f64> {
        self.matrix.transpose() * &self.matrix
    }
}

pub fn to_vector(img: &Image) -> DVector<f64> {
    DVector::from_column_slice(img.as_slice())
}

pub fn to_image(v: &DVector<f64>, width: usize, height: usize) -> Image {
    Image::new(width, height, v.as_slice().to_vec()).expect("finite oracle output")
}

fn check_size(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || width * height > MAX_PIXELS {
        return Err(Error::invalid(format!(
            "oracle is limited to {MAX_PIXELS} pixels, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Half-sample mirror: `..., x1, x0 | x0, x1, ... x_{n-1} | x_{n-1}, ...`
fn mirror_half(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Whole-sample mirror: `..., x2, x1 | x0, x1, ... x_{n-1} | x_{n-2}, ...`
fn mirror_whole(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * (n - 1) - i;
        } else {
            return i as usize;
        }
    }
}

/// Blur matrix by direct summation of `y[r,c] = sum_ab h[a,b] x[r+a-k, c+b-k]`.
pub fn densify_blur(psf: &Psf, width: usize, height: usize) -> Result<DenseOperator> {
    check_size(width, height)?;
    let n = width * height;
    let k = psf.radius() as isize;
    let mut m = DMatrix::zeros(n, n);
    for r in 0..height {
        for c in 0..width {
            let row = r * width + c;
            for a in 0..psf.size() {
                for b in 0..psf.size() {
                    let sr = mirror_half(r as isize + a as isize - k, height);
                    let sc = mirror_half(c as isize + b as isize - k, width);
                    m[(row, sr * width + sc)] += psf.tap(a, b);
                }
            }
        }
    }
    Ok(DenseOperator { matrix: m })
}

/// `sum_{i=1..n} C(n,i) (-1)^(i-1) (eta A^T A)^(i-1)` by repeated products.
///
/// Panics if `(I - eta A^T A)^n = I - eta W_n A^T A` fails to 1e-10.
pub fn dense_wn(a: &DenseOperator, eta: f64, n: usize) -> Result<DenseOperator> {
    if n == 0 || n > 16 {
        return Err(Error::invalid(format!("oracle weighting order must be in 1..=16, got {n}")));
    }
    let dim = a.cols();
    let g = a.gram() * eta;
    let id = DMatrix::<f64>::identity(dim, dim);
    let mut power = id.clone();
    let mut w = DMatrix::zeros(dim, dim);
    let mut binom = 1.0;
    for i in 1..=n {
        binom = binom * (n + 1 - i) as f64 / i as f64;
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        w += &power * (sign * binom);
        power = &power * &g;
    }
    let lhs = (0..n).fold(id.clone(), |acc, _| acc * (&id - &g));
    let rhs = &id - &w * &g;
    let err = (lhs - rhs).amax();
    assert!(err <= 1e-10, "weighting identity violated by {err}");
    Ok(DenseOperator { matrix: w })
}

/// One 1D analysis level on `x`, written as `[low | high]`.
fn analysis_1d(x: &[f64]) -> Vec<f64> {
    let len = x.len();
    let half = len / 2;
    let at = |i: isize| x[mirror_whole(i, len)];
    let mut out = vec![0.0; len];
    for i in 0..half {
        let e = 2 * i as isize;
        let mut s = CDF97_LOWPASS[0] * at(e);
        for m in 1..5 {
            s += CDF97_LOWPASS[m] * (at(e - m as isize) + at(e + m as isize));
        }
        let o = e + 1;
        let mut d = CDF97_HIGHPASS[0] * at(o);
        for m in 1..4 {
            d += CDF97_HIGHPASS[m] * (at(o - m as isize) + at(o + m as isize));
        }
        out[i] = s;
        out[half + i] = d;
    }
    out
}

fn analysis_2d(img: &[f64], width: usize, height: usize, levels: usize) -> Vec<f64> {
    let mut v = img.to_vec();
    let (mut w, mut h) = (width, height);
    for _ in 0..levels {
        for r in 0..h {
            let row: Vec<f64> = v[r * width..r * width + w].to_vec();
            v[r * width..r * width + w].copy_from_slice(&analysis_1d(&row));
        }
        for c in 0..w {
            let col: Vec<f64> = (0..h).map(|r| v[r * width + c]).collect();
            for (r, val) in analysis_1d(&col).into_iter().enumerate() {
                v[r * width + c] = val;
            }
        }
        w /= 2;
        h /= 2;
    }
    v
}

/// Dense CDF 9/7 analysis `Phi` and synthesis `Phi^{-1}`, plus a mask of
/// the coarsest approximation coefficients.
#[derive(Debug, Clone)]
pub struct DenseWavelet {
    pub analysis: DMatrix<f64>,
    pub synthesis: DMatrix<f64>,
    pub approximation: Vec<bool>,
}

pub fn dense_wavelet(width: usize, height: usize, levels: usize) -> Result<DenseWavelet> {
    check_size(width, height)?;
    let block = 1usize << levels.min(31);
    if levels == 0 || !width.is_multiple_of(block) || !height.is_multiple_of(block) {
        return Err(Error::invalid(format!("{width}x{height} does not allow {levels} levels")));
    }
    let n = width * height;
    let mut analysis = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        for (i, v) in analysis_2d(&e, width, height, levels).into_iter().enumerate() {
            analysis[(i, j)] = v;
        }
    }
    let synthesis = analysis
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numeric {
            iterations: 0,
            message: "dense wavelet analysis matrix is singular".into(),
        })?;
    let (aw, ah) = (width >> levels, height >> levels);
    let approximation = (0..n).map(|i| i / width < ah && i % width < aw).collect();
    Ok(DenseWavelet {
        analysis,
        synthesis,
        approximation,
    })
}

impl DenseWavelet {
    /// `Phi^{-1} S_gamma(Phi x)` with the approximation band untouched.
    pub fn prox(&self, x: &DVector<f64>, gamma: f64) -> DVector<f64> {
        let mut c = &self.analysis * x;
        for (i, v) in c.iter_mut().enumerate() {
            if !self.approximation[i] {
                *v = v.signum() * (v.abs() - gamma).max(0.0);
            }
        }
        &self.synthesis * c
    }

    pub fn l1(&self, x: &DVector<f64>) -> f64 {
        (&self.analysis * x)
            .iter()
            .zip(&self.approximation)
            .filter(|(_, &a)| !a)
            .map(|(v, _)| v.abs())
            .sum()
    }
}

/// Everything the dense step needs.
#[derive(Debug, Clone)]
pub struct DenseProblem {
    pub a: DenseOperator,
    /// Weighting matrix (identity for n = 1).
    pub w: DMatrix<f64>,
    pub wavelet: DenseWavelet,
    pub b: DVector<f64>,
    pub eta: f64,
    pub lambda: f64,
    pub p: f64,
    pub momentum: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub alpha: f64,
}

impl DenseState {
    pub fn new(x0: &DVector<f64>) -> Self {
        Self {
            x: x0.clone(),
            y: x0.clone(),
            alpha: 1.0,
        }
    }
}

impl DenseProblem {
    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.a.matrix.transpose() * (&self.a.matrix * x - &self.b)
    }

    /// `0.5 ||A x - b||^2 + lambda ||Phi x||_1`
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * (&self.a.matrix * x - &self.b).norm_squared() + self.lambda * self.wavelet.l1(x)
    }
}

/// One weighted, thresholded, extrapolated step with explicit matrices.
pub fn dense_solver_step(state: &DenseState, pb: &DenseProblem) -> DenseState {
    let z = &state.y - (&pb.w * pb.gradient(&state.y)) * pb.eta;
    let x = pb.wavelet.prox(&z, pb.p * pb.lambda * pb.eta);
    let alpha = (1.0 + (1.0 + 4.0 * state.alpha * state.alpha).sqrt()) / 2.0;
    let y = if pb.momentum {
        &x + (&x - &state.x) * ((state.alpha - 1.0) / alpha)
    } else {
        x.clone()
    };
    DenseState { x, y, alpha }
}

/// Relative eigenvalue floor below which a system counts as singular.
const SINGULAR_TOL: f64 = 1e-12;

/// `(A^T A + ridge I)^{-1} A^T b` through a symmetric eigendecomposition.
pub fn normal_equations_solve(a: &DenseOperator, b: &DVector<f64>, ridge: f64) -> Result<DVector<f64>> {
    if !(ridge >= 0.0) {
        return Err(Error::invalid(format!("ridge must be non-negative, got {ridge}")));
    }
    let n = a.cols();
    let m = a.gram() + DMatrix::<f64>::identity(n, n) * ridge;
    let eig = SymmetricEigen::new(m);
    let top = eig.eigenvalues.amax();
    let low = eig.eigenvalues.min();
    if !(low > SINGULAR_TOL * top) {
        return Err(Error::Numeric {
            iterations: 0,
            message: format!("normal equations are singular (eigenvalues {low:e} .. {top:e})"),
        });
    }
    let rhs = a.matrix.transpose() * b;
    let coords = eig.eigenvectors.transpose() * rhs;
    let scaled = coords.component_div(&eig.eigenvalues);
    Ok(&eig.eigenvectors * scaled)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `v^T W^{-1} v`
pub fn dense_wnorm_sq(v: &DVector<f64>, w: &DMatrix<f64>) -> Result<f64> {
    let inv = w.clone().try_inverse().ok_or_else(|| Error::Numeric {
        iterations: 0,
        message: "weighting matrix is singular".into(),
    })?;
    Ok(v.dot(&(inv * v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrors() {
        let half: Vec<usize> = (-3..7).map(|i| mirror_half(i, 4)).collect();
        assert_eq!(half, [2, 1, 0, 0, 1, 2, 3, 3, 2, 1]);
        let whole: Vec<usize> = (-3..7).map(|i| mirror_whole(i, 4)).collect();
        assert_eq!(whole, [3, 2, 1, 0, 1, 2, 3, 2, 1, 0]);
    }

    #[test]
    fn size_cap() {
        assert!(densify_blur(&Psf::delta(), 16, 16).is_ok());
        assert!(densify_blur(&Psf::delta(), 17, 16).is_err());
    }

    #[test]
    fn delta_blur_is_identity() {
        let a = densify_blur(&Psf::delta(), 4, 3).unwrap();
        assert_eq!(a.matrix, DMatrix::identity(12, 12));
    }

    #[test]
    fn rows_sum_to_one() {
        let a = densify_blur(&Psf::gaussian(5, 1.3).unwrap(), 6, 7).unwrap();
        for r in a.matrix.row_iter() {
            assert!((r.sum() - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn wn_low_orders() {
        let a = densify_blur(&Psf::gaussian(3, 1.0).unwrap(), 4, 4).unwrap();
        let w1 = dense_wn(&a, 0.9, 1).unwrap();
        assert_eq!(w1.matrix, DMatrix::identity(16, 16));
        let w2 = dense_wn(&a, 0.9, 2).unwrap();
        let expect = DMatrix::<f64>::identity(16, 16) * 2.0 - a.gram() * 0.9;
        assert!((w2.matrix - expect).amax() <= 1e-14);
        assert!(dense_wn(&a, 1.0, 17).is_err());
    }

    #[test]
    fn wavelet_matrix_inverts() {
        let wv = dense_wavelet(8, 8, 2).unwrap();
        let prod = &wv.synthesis * &wv.analysis;
        assert!((prod - DMatrix::<f64>::identity(64, 64)).amax() <= 1e-10);
        assert_eq!(wv.approximation.iter().filter(|&&a| a).count(), 4);
    }

    #[test]
    fn normal_equations() {
        let a = DenseOperator {
            matrix: DMatrix::identity(5, 5),
        };
        let b = DVector::from_vec(vec![1.0, -2.0, 3.0, 0.5, 0.0]);
        let x = normal_equations_solve(&a, &b, 0.0).unwrap();
        assert!((x - &b).amax() <= 1e-14);
        let singular = DenseOperator {
            matrix: DMatrix::zeros(5, 5),
        };
        assert!(matches!(normal_equations_solve(&singular, &b, 0.0), Err(Error::Numeric { .. })));
        assert!(normal_equations_solve(&singular, &b, 1.0).is_ok());
    }
}
