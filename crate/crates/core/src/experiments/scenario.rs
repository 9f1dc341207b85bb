use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::linop::{blur_apply, Psf};
use crate::solvers::{SolverConfig, Variant};

use super::images::{load_image_file, load_test_image, synthetic_image, ImageOrigin, TestImage};
use super::metrics::add_awgn;

/// Gaussian blur kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsfSpec {
    pub size: usize,
    pub sigma: f64,
}

impl PsfSpec {
    /// 7x7 Gaussian with standard deviation 4.
    pub const STANDARD: PsfSpec = PsfSpec { size: 7, sigma: 4.0 };

    pub fn build(&self) -> Result<Psf> {
        Psf::gaussian(self.size, self.sigma)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImageSpec {
    /// A standard image looked up by name, synthetic if absent.
    Named(String),
    /// An explicit PGM file; missing files are errors.
    File(PathBuf),
    Synthetic { seed: u64 },
}

impl ImageSpec {
    pub fn named(name: &str) -> Self {
        ImageSpec::Named(name.to_string())
    }
}

/// FISTA iteration budget used for a noise level: 45 at 1e-2, 180 at 1e-3.
pub fn standard_budget(noise_sigma: f64) -> usize {
    if noise_sigma < 5e-3 {
        180
    } else {
        45
    }
}

/// One benchmark setting: image, blur, noise and solver budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub image: ImageSpec,
    /// Side length the image is reduced to.
    pub size: usize,
    pub psf: PsfSpec,
    pub noise_sigma: f64,
    /// Overrides `lambda = 10 sigma^2`.
    pub lambda_override: Option<f64>,
    /// FISTA budget `K`; also the run length for curves and sweeps.
    pub iterations: usize,
    /// Weighted variants get `K / iter_divisor` iterations in the table.
    pub iter_divisor: usize,
    pub trials: usize,
    /// Trial `t` draws noise with seed `seed + t`.
    pub seed: u64,
    pub eta: f64,
    pub n: usize,
    /// EFISTA threshold scale; `None` uses `lambda_max(W_n)`.
    pub p: Option<f64>,
    pub wavelet_levels: usize,
    /// Record wall time; off makes every output byte-deterministic.
    pub record_time: bool,
}

impl Scenario {
    pub fn new(image: ImageSpec, noise_sigma: f64) -> Self {
        Self {
            image,
            size: 256,
            psf: PsfSpec::STANDARD,
            noise_sigma,
            lambda_override: None,
            iterations: standard_budget(noise_sigma),
            iter_divisor: 3,
            trials: 10,
            seed: 0,
            eta: 1.0,
            n: 8,
            p: None,
            wavelet_levels: 8,
            record_time: true,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_override.unwrap_or(10.0 * self.noise_sigma * self.noise_sigma)
    }

    pub fn reduced_iterations(&self) -> usize {
        self.iterations / self.iter_divisor
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("a scenario needs at least one trial"));
        }
        if self.iter_divisor == 0 {
            return Err(Error::invalid("iteration divisor must be positive"));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::invalid(format!("noise sigma must be non-negative, got {}", self.noise_sigma)));
        }
        if self.size == 0 || !self.size.is_multiple_of(1 << self.wavelet_levels.min(63)) {
            return Err(Error::invalid(format!(
                "image size {} is not divisible by 2^{}",
                self.size, self.wavelet_levels
            )));
        }
        Ok(())
    }

    pub fn load_image(&self) -> Result<TestImage> {
        match &self.image {
            ImageSpec::Named(name) => load_test_image(name, self.size),
            ImageSpec::File(path) => load_image_file(path, Some(self.size)),
            ImageSpec::Synthetic { seed } => Ok(TestImage {
                id: format!("synthetic-{seed}"),
                image: synthetic_image(self.size, self.size, *seed),
                origin: ImageOrigin::Synthetic { seed: *seed },
            }),
        }
    }

    /// Blurred, noisy observation for trial `trial`.
    pub fn observe(&self, psf: &Psf, truth: &Image, trial: usize) -> Result<Image> {
        let blurred = blur_apply(psf, truth)?;
        add_awgn(&blurred, self.noise_sigma, self.seed.wrapping_add(trial as u64))
    }

    pub fn solver_config(&self, variant: Variant, iterations: usize) -> SolverConfig {
        SolverConfig {
            variant,
            eta: self.eta,
            lambda: self.lambda(),
            n: self.n,
            p: self.p,
            max_iters: iterations,
            wavelet_levels: self.wavelet_levels,
            record_psnr: true,
            spectral_path: true,
            rel_tol: None,
            record_time: self.record_time,
        }
    }
}
