use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::blur::normal_apply;
use super::dct::Dct2d;
use super::psf::Psf;
use crate::error::{Error, Result};
use crate::image::Image;

const POWER_ITERATION_TOL: f64 = 1e-8;
const POWER_ITERATION_MAX: usize = 10_000;

/// Eigenvalues of `eta * A^T A` in the 2D DCT-II basis.
///
/// `mu` is indexed like an image: `mu[f_row * width + f_col]`.
#[derive(Debug, Clone)]
pub struct SpectralDiag {
    width: usize,
    height: usize,
    eta: f64,
    mu: Vec<f64>,
    dct: Dct2d,
}

impl SpectralDiag {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn dct(&self) -> &Dct2d {
        &self.dct
    }

    /// Largest eigenvalue of `A^T A` (without the step size).
    pub fn lambda_max_ata(&self) -> f64 {
        self.mu.iter().fold(0.0f64, |m, &v| m.max(v)) / self.eta
    }

    /// `idct2(mu * dct2(x))`, i.e. `eta * A^T A x`.
    pub fn apply(&self, x: &Image) -> Result<Image> {
        if x.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: x.dims(),
            });
        }
        let mut c = self.dct.forward(x);
        c.as_mut_slice()
            .iter_mut()
            .zip(&self.mu)
            .for_each(|(v, m)| *v *= m);
        Ok(self.dct.inverse(&c))
    }
}

/// Eigenvalues of `A` along one axis pair: `sum_ab h[a,b] cos(w1 d_a) cos(w2 d_b)`.
fn blur_eigenvalues(psf: &Psf, width: usize, height: usize) -> Vec<f64> {
    let k = psf.size();
    let r = psf.radius() as f64;
    let row_cos: Vec<Vec<f64>> = (0..height)
        .map(|f| {
            (0..k)
                .map(|a| (PI * f as f64 * (a as f64 - r) / height as f64).cos())
                .collect()
        })
        .collect();
    let col_cos: Vec<Vec<f64>> = (0..width)
        .map(|f| {
            (0..k)
                .map(|b| (PI * f as f64 * (b as f64 - r) / width as f64).cos())
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(width * height);
    for rc in &row_cos {
        // Contract the kernel rows once per row frequency.
        let partial: Vec<f64> = (0..k)
            .map(|b| (0..k).map(|a| psf.tap(a, b) * rc[a]).sum())
            .collect();
        for cc in &col_cos {
            out.push(partial.iter().zip(cc).map(|(p, c)| p * c).sum());
        }
    }
    out
}

/// DCT-domain eigenvalues of `eta * A^T A` for a doubly symmetric kernel.
pub fn spectral_decompose(psf: &Psf, eta: f64, width: usize, height: usize) -> Result<SpectralDiag> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::invalid(format!("step size must be positive, got {eta}")));
    }
    if width == 0 || height == 0 || psf.size() > width.min(height) {
        return Err(Error::invalid(format!(
            "psf of size {} does not fit a {width}x{height} image",
            psf.size()
        )));
    }
    if !psf.is_doubly_symmetric() {
        return Err(Error::Unsupported(
            "the DCT diagonalizes only doubly symmetric kernels; use the n-step path".into(),
        ));
    }
    let mu = blur_eigenvalues(psf, width, height)
        .into_iter()
        .map(|l| {
            let m = eta * l * l;
            debug_assert!(m >= -1e-12);
            m.max(0.0)
        })
        .collect();
    Ok(SpectralDiag {
        width,
        height,
        eta,
        mu,
        dct: Dct2d::new(width, height),
    })
}

/// Largest eigenvalue of `A^T A`.
///
/// Exact through the DCT spectrum when the kernel is doubly symmetric, power
/// iteration otherwise.
pub fn lambda_max_ata(psf: &Psf, width: usize, height: usize) -> Result<f64> {
    match spectral_decompose(psf, 1.0, width, height) {
        Ok(spec) => Ok(spec.lambda_max_ata()),
        Err(Error::Unsupported(_)) => power_iteration(psf, width, height),
        Err(e) => Err(e),
    }
}

fn power_iteration(psf: &Psf, width: usize, height: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = Image::from_fn(width, height, |_, _| rng.random_range(0.5..1.5));
    v = v.scale(1.0 / v.norm());
    let mut estimate = 0.0;
    for it in 1..=POWER_ITERATION_MAX {
        let w = normal_apply(psf, &v)?;
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        v = w.scale(1.0 / norm);
        if it > 1 && (next - estimate).abs() <= POWER_ITERATION_TOL * next.abs() {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::Numeric {
        iterations: POWER_ITERATION_MAX,
        message: format!("power iteration did not reach relative tolerance {POWER_ITERATION_TOL}"),
    })
}
