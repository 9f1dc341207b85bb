use crate::error::{Error, Result};
use crate::image::Image;
use crate::linop::{blur_apply, gradient, lambda_max_ata, spectral_decompose, Psf};
use crate::wavelet::{l1_norm_wavelet, prox_l1_wavelet_with_norm};
use crate::weighting::{apply_weighted_gradient_nstep, build_filter, lambda_max_w, SpectralStep, WeightingFilter};

use super::config::SolverConfig;

/// Relative slack on the step-size bound, so `eta = 1` passes for a
/// unit-norm blur whose computed spectral radius is `1 + 1e-15`.
const ETA_SLACK: f64 = 1e-9;

/// A deblurring problem with every solver setting resolved.
#[derive(Debug, Clone)]
pub struct Problem {
    psf: Psf,
    b: Image,
    eta: f64,
    lambda: f64,
    n: usize,
    p: f64,
    levels: usize,
    momentum: bool,
    filter: Option<WeightingFilter>,
    /// Set when the spectral path applies.
    step: Option<SpectralStep>,
    lambda_max_ata: f64,
    lambda_max_w: f64,
    warnings: Vec<String>,
}

impl Problem {
    /// Validates `cfg` against the operator and precomputes the weighting filter.
    pub fn new(psf: &Psf, b: &Image, cfg: &SolverConfig) -> Result<Self> {
        let (w, h) = b.dims();
        if !b.is_finite() {
            return Err(Error::invalid("observation contains non-finite values"));
        }
        if !(cfg.lambda >= 0.0) || !cfg.lambda.is_finite() {
            return Err(Error::invalid(format!("lambda must be non-negative, got {}", cfg.lambda)));
        }
        if cfg.n == 0 {
            return Err(Error::invalid("weighting order must be at least 1"));
        }
        if !(cfg.eta > 0.0) || !cfg.eta.is_finite() {
            return Err(Error::invalid(format!("step size must be positive, got {}", cfg.eta)));
        }
        if cfg.wavelet_levels == 0 || w % (1 << cfg.wavelet_levels) != 0 || h % (1 << cfg.wavelet_levels) != 0 {
            return Err(Error::invalid(format!(
                "{w}x{h} image does not support {} wavelet levels",
                cfg.wavelet_levels
            )));
        }
        let n = cfg.effective_n();

        let spectrum = match spectral_decompose(psf, cfg.eta, w, h) {
            Ok(s) => Some(s),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        let lmax_ata = match &spectrum {
            Some(s) => s.lambda_max_ata(),
            None => lambda_max_ata(psf, w, h)?,
        };
        if cfg.eta > (1.0 + ETA_SLACK) / lmax_ata {
            return Err(Error::invalid(format!(
                "step size {} exceeds 1/lambda_max(A^T A) = {}",
                cfg.eta,
                1.0 / lmax_ata
            )));
        }
        if cfg.spectral_path && n > 1 && spectrum.is_none() {
            return Err(Error::Unsupported(
                "spectral path needs a doubly symmetric kernel; disable it to use n-step weighting".into(),
            ));
        }
        let filter = spectrum.as_ref().map(|s| build_filter(s, n));
        let step = match (&spectrum, &filter) {
            (Some(s), Some(f)) if cfg.spectral_path && n > 1 => Some(SpectralStep::new(s, f, psf, b)?),
            _ => None,
        };
        // Without a spectrum, n bounds lambda_max(W_n) from above.
        let lmax_w = filter.as_ref().map_or(n as f64, lambda_max_w);

        let mut warnings = Vec::new();
        let p = if cfg.variant.scales_threshold() {
            let p = cfg.p.unwrap_or(lmax_w);
            if !(p >= 1.0) || !p.is_finite() {
                return Err(Error::invalid(format!("threshold scale p must be >= 1, got {p}")));
            }
            if p > lmax_w * (1.0 + 1e-12) {
                warnings.push(format!("p = {p} exceeds lambda_max(W_{n}) = {lmax_w}"));
            }
            p
        } else {
            1.0
        };

        Ok(Self {
            psf: psf.clone(),
            b: b.clone(),
            eta: cfg.eta,
            lambda: cfg.lambda,
            n,
            p,
            levels: cfg.wavelet_levels,
            momentum: cfg.variant.has_momentum(),
            filter,
            step,
            lambda_max_ata: lmax_ata,
            lambda_max_w: lmax_w,
            warnings,
        })
    }

    pub fn psf(&self) -> &Psf {
        &self.psf
    }

    pub fn observation(&self) -> &Image {
        &self.b
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Effective weighting order.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Effective threshold scale.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn momentum(&self) -> bool {
        self.momentum
    }

    pub fn filter(&self) -> Option<&WeightingFilter> {
        self.filter.as_ref()
    }

    pub fn lambda_max_ata(&self) -> f64 {
        self.lambda_max_ata
    }

    pub fn lambda_max_w(&self) -> f64 {
        self.lambda_max_w
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Shrinkage threshold `p * lambda * eta`.
    pub fn threshold(&self) -> f64 {
        self.p * self.lambda * self.eta
    }

    /// `y - eta W_n grad f(y)`.
    pub fn forward_step(&self, y: &Image) -> Result<Image> {
        if self.n == 1 {
            let g = gradient(&self.psf, y, &self.b)?;
            return Ok(y.add_scaled(-self.eta, &g));
        }
        match &self.step {
            Some(step) => step.apply(y),
            None => apply_weighted_gradient_nstep(&self.psf, y, &self.b, self.eta, self.n),
        }
    }

    /// `(f(x), lambda * ||Phi x||_1)`
    pub fn objective_parts(&self, x: &Image) -> Result<(f64, f64)> {
        objective_parts(x, &self.b, &self.psf, self.lambda, self.levels)
    }

    /// [`Problem::objective_parts`] at `state.x`, reusing the step's l1 norm.
    pub fn state_objective_parts(&self, state: &SolverState) -> Result<(f64, f64)> {
        match state.x_l1 {
            Some(l1) => {
                state.x.same_dims(&self.b)?;
                let data = 0.5 * blur_apply(&self.psf, &state.x)?.sub(&self.b).norm_sq();
                Ok((data, self.lambda * l1))
            }
            None => self.objective_parts(&state.x),
        }
    }

    /// `F(x) = f(x) + lambda ||Phi x||_1`
    pub fn objective(&self, x: &Image) -> Result<f64> {
        let (f, g) = self.objective_parts(x)?;
        Ok(f + g)
    }
}

fn objective_parts(x: &Image, b: &Image, psf: &Psf, lambda: f64, levels: usize) -> Result<(f64, f64)> {
    x.same_dims(b)?;
    let r = blur_apply(psf, x)?.sub(b);
    let data = 0.5 * r.norm_sq();
    let reg = if lambda == 0.0 {
        0.0
    } else {
        lambda * l1_norm_wavelet(x, levels)?
    };
    Ok((data, reg))
}

/// `0.5 ||A x - b||^2 + lambda ||Phi x||_1`
pub fn objective(x: &Image, b: &Image, psf: &Psf, lambda: f64, levels: usize) -> Result<f64> {
    let (f, g) = objective_parts(x, b, psf, lambda, levels)?;
    Ok(f + g)
}

/// Next momentum weight `(1 + sqrt(1 + 4 alpha^2)) / 2`.
pub fn momentum_alpha(alpha: f64) -> f64 {
    debug_assert!(alpha >= 1.0);
    (1.0 + (1.0 + 4.0 * alpha * alpha).sqrt()) / 2.0
}

/// `x_new + ((alpha - 1) / alpha_new) (x_new - x_old)`
pub fn momentum_extrapolate(x_new: &Image, x_old: &Image, alpha: f64, alpha_new: f64) -> Result<Image> {
    x_new.same_dims(x_old)?;
    let beta = (alpha - 1.0) / alpha_new;
    Ok(x_new.zip_map(x_old, |a, b| a + beta * (a - b)))
}

/// Iterates carried between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: Image,
    pub x_prev: Image,
    pub y: Image,
    pub alpha: f64,
    pub iter: usize,
    /// `||Phi x||_1` read off the thresholded coefficients, once a step has run.
    pub x_l1: Option<f64>,
}

impl SolverState {
    /// `x = y = x_prev = x0`, `alpha = 1`.
    pub fn initial(x0: &Image) -> Self {
        Self {
            x: x0.clone(),
            x_prev: x0.clone(),
            y: x0.clone(),
            alpha: 1.0,
            iter: 0,
            x_l1: None,
        }
    }
}

/// One iteration: threshold the weighted gradient step, then extrapolate.
pub fn efista_step(state: &SolverState, problem: &Problem) -> Result<SolverState> {
    let z = problem.forward_step(&state.y)?;
    let (x_new, l1) = prox_l1_wavelet_with_norm(&z, problem.threshold(), problem.levels)?;
    let alpha_new = momentum_alpha(state.alpha);
    let y = if problem.momentum {
        momentum_extrapolate(&x_new, &state.x, state.alpha, alpha_new)?
    } else {
        x_new.clone()
    };
    Ok(SolverState {
        x_prev: state.x.clone(),
        x: x_new,
        y,
        alpha: alpha_new,
        iter: state.iter + 1,
        x_l1: Some(l1),
    })
}
