use std::time::Instant;

use crate::error::Result;
use crate::experiments::psnr;
use crate::image::Image;
use crate::linop::Psf;

use super::config::SolverConfig;
use super::step::{efista_step, Problem, SolverState};
use super::trace::{IterationRecord, IterationTrace};

/// A run is stopped as diverged once the objective passes this multiple of `F(x_0)`.
pub const BLOWUP_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Ran the full iteration budget.
    Completed,
    /// Stopped early on the relative-change tolerance after this many iterations.
    Converged { iterations: usize },
    /// Stopped on a non-finite or blown-up objective at this iteration.
    Diverged { iteration: usize },
}

impl RunStatus {
    pub fn is_diverged(self) -> bool {
        matches!(self, RunStatus::Diverged { .. })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Last finite iterate.
    pub x: Image,
    pub trace: IterationTrace,
    pub status: RunStatus,
    pub warnings: Vec<String>,
}

/// Settings that control the loop rather than the update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunControl {
    pub max_iters: usize,
    pub rel_tol: Option<f64>,
    pub record_psnr: bool,
    pub record_time: bool,
}

impl From<&SolverConfig> for RunControl {
    fn from(cfg: &SolverConfig) -> Self {
        Self {
            max_iters: cfg.max_iters,
            rel_tol: cfg.rel_tol,
            record_psnr: cfg.record_psnr,
            record_time: cfg.record_time,
        }
    }
}

fn blown_up(objective: f64, initial: f64) -> bool {
    !objective.is_finite() || (initial > 0.0 && objective > BLOWUP_FACTOR * initial)
}

/// Iterates a prepared problem from `x0`.
pub fn solve(problem: &Problem, x0: &Image, truth: Option<&Image>, control: RunControl) -> Result<RunOutcome> {
    x0.same_dims(problem.observation())?;
    if let Some(t) = truth {
        t.same_dims(x0)?;
    }
    let truth = truth.filter(|_| control.record_psnr);
    let start = Instant::now();

    let f0 = problem.objective(x0)?;
    let mut trace = IterationTrace::new(f0, truth.map(|t| psnr(x0, t)).transpose()?);
    let mut state = SolverState::initial(x0);
    let mut status = RunStatus::Completed;
    let mut prev = f0;

    for k in 1..=control.max_iters {
        let next = efista_step(&state, problem)?;
        let (data_term, regularizer) = problem.state_objective_parts(&next)?;
        let objective = data_term + regularizer;
        if blown_up(objective, f0) || !next.x.is_finite() {
            status = RunStatus::Diverged { iteration: k };
            break;
        }
        state = next;
        trace.push(IterationRecord {
            iter: k,
            objective,
            data_term,
            regularizer,
            psnr: truth.map(|t| psnr(&state.x, t)).transpose()?,
            seconds: control.record_time.then(|| start.elapsed().as_secs_f64()),
        });
        if let Some(tol) = control.rel_tol {
            if (objective - prev).abs() <= tol * prev.abs() {
                status = RunStatus::Converged { iterations: k };
                break;
            }
        }
        prev = objective;
    }

    Ok(RunOutcome {
        x: state.x,
        trace,
        status,
        warnings: problem.warnings().to_vec(),
    })
}

/// Validates `cfg`, builds the problem and runs it.
pub fn run_solver(cfg: &SolverConfig, psf: &Psf, b: &Image, x0: &Image, truth: Option<&Image>) -> Result<RunOutcome> {
    let problem = Problem::new(psf, b, cfg)?;
    solve(&problem, x0, truth, RunControl::from(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::blur_apply;
    use crate::solvers::Variant;
    use crate::testutil::random_image;

    fn instance() -> (Psf, Image, Image) {
        let psf = Psf::gaussian(5, 1.5).unwrap();
        let truth = random_image(32, 32, 4);
        let b = blur_apply(&psf, &truth).unwrap();
        (psf, b, truth)
    }

    #[test]
    fn zero_iterations() {
        let (psf, b, _) = instance();
        let cfg = SolverConfig::new(Variant::Efista).with_iters(0).with_levels(3);
        let out = run_solver(&cfg, &psf, &b, &b, None).unwrap();
        assert_eq!(out.x, b);
        assert!(out.trace.is_empty());
        assert_eq!(out.status, RunStatus::Completed);
    }

    #[test]
    fn deterministic_without_timing() {
        let (psf, b, truth) = instance();
        let mut cfg = SolverConfig::new(Variant::Efista).with_iters(15).with_levels(3).with_lambda(1e-4);
        cfg.record_time = false;
        let a = run_solver(&cfg, &psf, &b, &b, Some(&truth)).unwrap();
        let c = run_solver(&cfg, &psf, &b, &b, Some(&truth)).unwrap();
        assert_eq!(a.trace, c.trace);
        assert_eq!(a.x, c.x);
        assert!(a.trace.records().iter().all(|r| r.seconds.is_none() && r.psnr.is_some()));
    }

    #[test]
    fn noiseless_fista_improves() {
        let (psf, b, truth) = instance();
        let cfg = SolverConfig::new(Variant::Fista).with_iters(50).with_levels(3);
        let out = run_solver(&cfg, &psf, &b, &b, Some(&truth)).unwrap();
        let t = &out.trace;
        assert_eq!(t.len(), 50);
        assert!(t.final_objective() < 0.1 * t.initial_objective(), "{} vs {}", t.final_objective(), t.initial_objective());
        assert!(t.final_psnr().unwrap() > t.initial_psnr().unwrap());
        assert!(t.seconds_per_iter().is_some());
    }

    #[test]
    fn relative_tolerance_stops_early() {
        let (psf, b, _) = instance();
        let mut cfg = SolverConfig::new(Variant::Fista).with_iters(10_000).with_levels(3);
        cfg.rel_tol = Some(1e-3);
        let out = run_solver(&cfg, &psf, &b, &b, None).unwrap();
        match out.status {
            RunStatus::Converged { iterations } => assert_eq!(iterations, out.trace.len()),
            other => panic!("expected early stop, got {other:?}"),
        }
    }

    #[test]
    fn blowup_guard() {
        assert!(blown_up(f64::NAN, 1.0));
        assert!(blown_up(f64::INFINITY, 1.0));
        assert!(blown_up(2e6, 1.0));
        assert!(!blown_up(9e5, 1.0));
        assert!(!blown_up(5.0, 0.0));
    }
}
