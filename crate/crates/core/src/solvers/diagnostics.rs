//! Majorizer and rate-bound checks for the weighted update.

use std::fmt;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::linop::gradient;
use crate::wavelet::l1_norm_wavelet;
use crate::weighting::WeightingFilter;

use super::step::Problem;
use super::trace::IterationTrace;

/// `||v||^2` in the `W_n^{-1}` seminorm: `sum_f dct2(v)[f]^2 / phi[f]`.
pub fn wnorm_sq(v: &Image, filter: &WeightingFilter) -> Result<f64> {
    if filter.order() == 1 {
        return Ok(v.norm_sq());
    }
    filter.quadratic_form(v, |p| 1.0 / p)
}

fn problem_wnorm_sq(v: &Image, problem: &Problem) -> Result<f64> {
    match problem.filter() {
        Some(f) => wnorm_sq(v, f),
        None if problem.n() == 1 => Ok(v.norm_sq()),
        None => Err(Error::Unsupported(
            "the W_n^{-1} seminorm needs a spectral weighting filter".into(),
        )),
    }
}

/// `f(z) + <x - z, grad f(z)> + ||x - z||^2_{W^-1} / (2 eta) + p lambda ||Phi x||_1`
pub fn surrogate_q(x: &Image, z: &Image, problem: &Problem) -> Result<f64> {
    x.same_dims(z)?;
    let (fz, _) = problem.objective_parts(z)?;
    let g = gradient(problem.psf(), z, problem.observation())?;
    let d = x.sub(z);
    let quad = problem_wnorm_sq(&d, problem)? / (2.0 * problem.eta());
    let reg = if problem.lambda() == 0.0 {
        0.0
    } else {
        problem.p() * problem.lambda() * l1_norm_wavelet(x, problem.levels())?
    };
    Ok(fz + d.dot(&g) + quad + reg)
}

/// Outcome of checking `F(x_k) - F(x*) <= C ||x_0 - x*||^2_{W^-1} / (k+1)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// `C = 2 / eta`
    pub constant: f64,
    /// `||x_0 - x*||^2_{W^-1}`
    pub initial_distance: f64,
    pub reference_objective: f64,
    /// Iterations checked (`k >= 2`).
    pub checked: usize,
    /// Largest `gap_k / bound_k`; at most 1 when the bound holds.
    pub max_ratio: f64,
    pub worst_iter: Option<usize>,
    /// Smallest constant that would satisfy every checked iteration.
    pub empirical_constant: f64,
    pub violations: usize,
}

impl RateReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for RateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rate bound (squared W^-1 seminorm, C = 2/eta = {:.4}): {} over {} iterations, \
             max ratio {:.4}{}, empirical constant {:.4e}",
            self.constant,
            if self.passed() { "holds" } else { "VIOLATED" },
            self.checked,
            self.max_ratio,
            self.worst_iter.map(|k| format!(" at k = {k}")).unwrap_or_default(),
            self.empirical_constant
        )
    }
}

/// Checks every `k >= 2` in `trace` against the accelerated rate bound.
pub fn rate_check(trace: &IterationTrace, problem: &Problem, x0: &Image, x_star: &Image) -> Result<RateReport> {
    let dist = problem_wnorm_sq(&x0.sub(x_star), problem)?;
    let f_star = problem.objective(x_star)?;
    let constant = 2.0 / problem.eta();

    let mut report = RateReport {
        constant,
        initial_distance: dist,
        reference_objective: f_star,
        checked: 0,
        max_ratio: f64::NEG_INFINITY,
        worst_iter: None,
        empirical_constant: 0.0,
        violations: 0,
    };
    for r in trace.records().iter().filter(|r| r.iter >= 2) {
        let gap = r.objective - f_star;
        let scale = dist / ((r.iter + 1) as f64).powi(2);
        let bound = constant * scale;
        let ratio = if bound > 0.0 {
            gap / bound
        } else if gap > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        report.checked += 1;
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.worst_iter = Some(r.iter);
        }
        if gap > bound {
            report.violations += 1;
        }
        if scale > 0.0 {
            report.empirical_constant = report.empirical_constant.max(gap / scale);
        } else if gap > 0.0 {
            report.empirical_constant = f64::INFINITY;
        }
    }
    if report.checked == 0 {
        report.max_ratio = 0.0;
    }
    Ok(report)
}
