use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// The four proximal-gradient variants. They share one update rule and
/// differ only in momentum, weighting order and threshold scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Ista,
    Fista,
    Ifista,
    Efista,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Ista, Variant::Fista, Variant::Ifista, Variant::Efista];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Ista => "ISTA",
            Variant::Fista => "FISTA",
            Variant::Ifista => "IFISTA",
            Variant::Efista => "EFISTA",
        }
    }

    pub fn has_momentum(self) -> bool {
        self != Variant::Ista
    }

    /// Whether the configured weighting order is honoured (otherwise n = 1).
    pub fn uses_weighting(self) -> bool {
        matches!(self, Variant::Ifista | Variant::Efista)
    }

    /// Whether the configured threshold scale is honoured (otherwise p = 1).
    pub fn scales_threshold(self) -> bool {
        self == Variant::Efista
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ista" => Ok(Variant::Ista),
            "fista" => Ok(Variant::Fista),
            "ifista" => Ok(Variant::Ifista),
            "efista" => Ok(Variant::Efista),
            other => Err(Error::invalid(format!(
                "unknown variant '{other}' (expected ista, fista, ifista or efista)"
            ))),
        }
    }
}

/// Solver settings. Fields the variant does not use are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Gradient step size, at most `1 / lambda_max(A^T A)`.
    pub eta: f64,
    /// Weight of the wavelet l1 term.
    pub lambda: f64,
    /// Weighting order for IFISTA and EFISTA.
    pub n: usize,
    /// EFISTA threshold scale; `None` picks `lambda_max(W_n)`.
    pub p: Option<f64>,
    pub max_iters: usize,
    pub wavelet_levels: usize,
    /// Record PSNR when a ground truth is supplied.
    pub record_psnr: bool,
    /// Apply `W_n` through the DCT instead of `n` gradient steps.
    pub spectral_path: bool,
    /// Stop early once the relative objective change drops below this.
    pub rel_tol: Option<f64>,
    /// Record cumulative wall time per iteration. Off gives bit-identical traces.
    pub record_time: bool,
}

impl SolverConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            eta: 1.0,
            lambda: 0.0,
            n: 8,
            p: None,
            max_iters: 100,
            wavelet_levels: 8,
            record_psnr: true,
            spectral_path: true,
            rel_tol: None,
            record_time: true,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_order(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.wavelet_levels = levels;
        self
    }

    /// Weighting order after the variant's reduction.
    pub fn effective_n(&self) -> usize {
        if self.variant.uses_weighting() {
            self.n
        } else {
            1
        }
    }
}
