//! The weighting matrix `W_n` that folds `n` plain gradient steps into one.
//!
//! `W_n = sum_{i=1..n} C(n,i) (-1)^(i-1) (eta A^T A)^(i-1)` satisfies
//! `(I - eta A^T A)^n = I - eta W_n A^T A`. In the DCT basis it is diagonal
//! with eigenvalues `phi(mu) = (1 - (1 - mu)^n) / mu`.
//!
//! Two application paths exist. The spectral path costs two DCTs per call;
//! the n-step path runs the gradient recursion directly and works for any
//! kernel.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::linop::{blur_adjoint, gradient, Dct2d, Psf, SpectralDiag};

/// Orders above this lose too much precision in the expanded polynomial.
pub const MAX_POLYNOMIAL_ORDER: usize = 32;

/// Below this `mu` the filter takes its `mu -> 0` limit `phi = n`.
pub const MU_FLOOR: f64 = 1e-14;

/// Coefficients `c[i-1] = C(n, i) (-1)^(i-1)` for `i = 1..=n`.
pub fn binomial_filter_weights(n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_POLYNOMIAL_ORDER {
        return Err(Error::invalid(format!(
            "weighting order must be in 1..={MAX_POLYNOMIAL_ORDER}, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    let mut binom: u64 = 1;
    for i in 1..=n as u64 {
        binom = binom * (n as u64 + 1 - i) / i;
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        out.push(sign * binom as f64);
    }
    Ok(out)
}

/// The `W_n` eigenvalue `(1 - (1 - mu)^n) / mu` for one `mu`.
///
/// Evaluated as the geometric sum `sum_{k<n} (1 - mu)^k`; the quotient form
/// cancels badly once `mu` drops below about `1e-6`.
pub fn filter_value(mu: f64, n: usize) -> f64 {
    if mu <= MU_FLOOR {
        return n as f64;
    }
    let q = 1.0 - mu;
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += term;
        term *= q;
    }
    sum
}

/// `W_n` as a diagonal in the DCT basis.
#[derive(Debug, Clone)]
pub struct WeightingFilter {
    order: usize,
    eta: f64,
    width: usize,
    height: usize,
    phi: Vec<f64>,
    dct: Dct2d,
}

/// Evaluates the weighting filter from a spectral decomposition.
///
/// Panics if the closed form and the expanded polynomial disagree on the
/// sampled frequencies, or if a filter bound fails where `mu` is in `[0, 1]`.
pub fn build_filter(spec: &SpectralDiag, n: usize) -> WeightingFilter {
    assert!(n >= 1, "weighting order must be at least 1");
    let phi: Vec<f64> = spec.mu().iter().map(|&m| filter_value(m, n)).collect();

    if n <= MAX_POLYNOMIAL_ORDER {
        let coeffs = binomial_filter_weights(n).expect("order checked");
        let stride = (phi.len() / 64).max(1);
        for f in (0..phi.len()).step_by(stride) {
            let mu = spec.mu()[f];
            let mut poly = 0.0;
            let mut magnitude = 0.0;
            for &c in coeffs.iter().rev() {
                poly = poly * mu + c;
                magnitude = magnitude * mu + c.abs();
            }
            assert!(
                (poly - phi[f]).abs() <= 1e-10 * magnitude.max(1.0),
                "W_{n} closed form {} and polynomial {poly} disagree at mu = {mu}",
                phi[f]
            );
        }
    }
    for (&p, &mu) in phi.iter().zip(spec.mu()) {
        if mu <= 1.0 {
            assert!(
                p >= 1.0 - 1e-12 && p <= n as f64 + 1e-12,
                "phi = {p} outside [1, {n}] at mu = {mu}"
            );
        }
        if mu <= 2.0 {
            assert!(p * mu <= 1.0 + 1e-12, "phi * mu = {} exceeds 1", p * mu);
        }
    }

    WeightingFilter {
        order: n,
        eta: spec.eta(),
        width: spec.width(),
        height: spec.height(),
        phi,
        dct: spec.dct().clone(),
    }
}

impl WeightingFilter {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn dct(&self) -> &Dct2d {
        &self.dct
    }

    fn check_dims(&self, g: &Image) -> Result<()> {
        if g.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: g.dims(),
            });
        }
        Ok(())
    }

    /// Multiplies each DCT coefficient of `g` by `weight(phi)`.
    pub(crate) fn apply_diag(&self, g: &Image, weight: impl Fn(f64) -> f64) -> Result<Image> {
        self.check_dims(g)?;
        let mut c = self.dct.forward(g);
        c.as_mut_slice()
            .iter_mut()
            .zip(&self.phi)
            .for_each(|(v, &p)| *v *= weight(p));
        Ok(self.dct.inverse(&c))
    }

    /// `sum_f dct2(v)[f]^2 * weight(phi[f])`
    pub(crate) fn quadratic_form(&self, v: &Image, weight: impl Fn(f64) -> f64) -> Result<f64> {
        self.check_dims(v)?;
        let c = self.dct.forward(v);
        Ok(c.as_slice()
            .iter()
            .zip(&self.phi)
            .map(|(x, &p)| x * x * weight(p))
            .sum())
    }
}

/// `W_n g` through the DCT. Order one returns `g` untouched.
pub fn apply_weighted_gradient_spectral(filter: &WeightingFilter, g: &Image) -> Result<Image> {
    filter.check_dims(g)?;
    if filter.order == 1 {
        return Ok(g.clone());
    }
    filter.apply_diag(g, |p| p)
}

/// Runs `n` plain gradient steps from `x`, which equals `x - eta W_n grad f(x)`.
pub fn apply_weighted_gradient_nstep(psf: &Psf, x: &Image, b: &Image, eta: f64, n: usize) -> Result<Image> {
    if n == 0 {
        return Err(Error::invalid("weighting order must be at least 1"));
    }
    x.same_dims(b)?;
    let mut z = x.clone();
    for _ in 0..n {
        let g = gradient(psf, &z, b)?;
        z = z.add_scaled(-eta, &g);
    }
    Ok(z)
}

/// The whole weighted step `y - eta W_n grad f(y)` as one DCT-domain affine map:
/// `idct((1 - mu)^n * dct(y) + phi * dct(eta A^T b))`.
#[derive(Debug, Clone)]
pub struct SpectralStep {
    gain: Vec<f64>,
    offset: Vec<f64>,
    dct: Dct2d,
}

impl SpectralStep {
    pub fn new(spec: &SpectralDiag, filter: &WeightingFilter, psf: &Psf, b: &Image) -> Result<Self> {
        filter.check_dims(b)?;
        let n = filter.order as i32;
        // Coefficients are kept in the transposed layout of `forward_transposed`.
        let (w, h) = b.dims();
        let mu = Image::from_raw(w, h, spec.mu().to_vec()).transpose();
        let phi = Image::from_raw(w, h, filter.phi.clone()).transpose();
        let gain = mu.as_slice().iter().map(|&m| (1.0 - m).powi(n)).collect();
        let atb = filter.dct.forward_transposed(&blur_adjoint(psf, b)?);
        let offset = atb
            .as_slice()
            .iter()
            .zip(phi.as_slice())
            .map(|(v, &p)| spec.eta() * p * v)
            .collect();
        Ok(Self {
            gain,
            offset,
            dct: filter.dct.clone(),
        })
    }

    pub fn apply(&self, y: &Image) -> Result<Image> {
        if y.dims() != self.dct.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dct.dims(),
                actual: y.dims(),
            });
        }
        let mut c = self.dct.forward_transposed(y);
        for ((v, &g), &o) in c.as_mut_slice().iter_mut().zip(&self.gain).zip(&self.offset) {
            *v = g * *v + o;
        }
        Ok(self.dct.inverse_transposed(c))
    }
}

/// Largest eigenvalue of `W_n`, attained at the smallest `mu`.
pub fn lambda_max_w(filter: &WeightingFilter) -> f64 {
    filter.phi.iter().fold(f64::MIN, |m, &p| m.max(p))
}

/// Upper bound on the per-pixel noise standard deviation after one weighted
/// gradient step: `eta * sigma_w * sqrt(lambda_max(A^T A)) * lambda_max(W_n)`.
pub fn noise_std_amplification(lambda_max_ata: f64, lambda_max_w: f64, sigma_w: f64, eta: f64) -> f64 {
    debug_assert!(lambda_max_ata >= 0.0 && lambda_max_w >= 0.0 && sigma_w >= 0.0 && eta >= 0.0);
    eta * sigma_w * lambda_max_ata.sqrt() * lambda_max_w
}
