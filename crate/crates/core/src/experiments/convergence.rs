use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solvers::{run_solver, solve, IterationTrace, Problem, RunOutcome, RunStatus, Variant};

use super::scenario::Scenario;

pub const CONVERGENCE_HEADER: &str = "iter,variant,n,p,trial,objective,psnr,seconds";

/// Mean over trials at one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPoint {
    pub iter: usize,
    pub objective: f64,
    pub psnr: Option<f64>,
    pub seconds: Option<f64>,
    /// Trials that reached this iteration.
    pub count: usize,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>, count: usize) -> Option<f64> {
    let mut sum = 0.0;
    for v in values {
        sum += v?;
    }
    Some(sum / count as f64)
}

/// Per-iteration means over the trials that reached each iteration.
pub fn mean_trace(traces: &[IterationTrace]) -> Vec<MeanPoint> {
    let len = traces.iter().map(|t| t.len()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let recs: Vec<_> = traces.iter().filter_map(|t| t.records().get(i)).collect();
            let count = recs.len();
            MeanPoint {
                iter: i + 1,
                objective: recs.iter().map(|r| r.objective).sum::<f64>() / count as f64,
                psnr: mean_of(recs.iter().map(|r| r.psnr), count),
                seconds: mean_of(recs.iter().map(|r| r.seconds), count),
                count,
            }
        })
        .collect()
}

/// All trials of one (variant, n) pair.
#[derive(Debug, Clone)]
pub struct Curve {
    pub variant: Variant,
    pub n: usize,
    /// Resolved threshold scale.
    pub p: f64,
    pub traces: Vec<IterationTrace>,
    pub statuses: Vec<RunStatus>,
}

impl Curve {
    /// File-friendly name such as `EFISTA_W8`.
    pub fn label(&self) -> String {
        if self.variant.uses_weighting() {
            format!("{}_W{}", self.variant, self.n)
        } else {
            self.variant.to_string()
        }
    }

    pub fn mean(&self) -> Vec<MeanPoint> {
        mean_trace(&self.traces)
    }

    pub fn mean_objectives(&self) -> Vec<f64> {
        self.mean().iter().map(|m| m.objective).collect()
    }

    pub fn any_blowup(&self) -> bool {
        self.statuses.iter().any(|s| s.is_diverged())
    }

    /// CSV with one row per (trial, iteration) followed by the mean rows.
    pub fn to_csv(&self) -> String {
        self.csv(true)
    }

    /// As [`Curve::to_csv`] without the mean rows.
    pub fn to_csv_trials(&self) -> String {
        self.csv(false)
    }

    fn csv(&self, with_mean: bool) -> String {
        let mut out = String::from(CONVERGENCE_HEADER);
        out.push('\n');
        let name = self.variant.name();
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        for (trial, trace) in self.traces.iter().enumerate() {
            for r in trace.records() {
                let _ = writeln!(
                    out,
                    "{},{name},{},{:.16e},{trial},{:.16e},{},{}",
                    r.iter,
                    self.n,
                    self.p,
                    r.objective,
                    cell(r.psnr),
                    cell(r.seconds)
                );
            }
        }
        for m in self.mean().into_iter().filter(|_| with_mean) {
            let _ = writeln!(
                out,
                "{},{name},{},{:.16e},mean,{:.16e},{},{}",
                m.iter,
                self.n,
                self.p,
                m.objective,
                cell(m.psnr),
                cell(m.seconds)
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceResult {
    pub image: String,
    pub curves: Vec<Curve>,
}

impl ConvergenceResult {
    pub fn curve(&self, variant: Variant, n: usize) -> Option<&Curve> {
        self.curves.iter().find(|c| c.variant == variant && c.n == n)
    }
}

/// (variant, n) pairs: unweighted variants once, weighted ones per `n`.
fn expand(variants: &[Variant], n_values: &[usize]) -> Vec<(Variant, usize)> {
    let mut out = Vec::new();
    for &v in variants {
        if v.uses_weighting() {
            out.extend(n_values.iter().map(|&n| (v, n)));
        } else {
            out.push((v, 1));
        }
    }
    out
}

/// Objective-versus-iteration traces over `scenario.iterations` iterations.
pub fn run_convergence_test(scenario: &Scenario, variants: &[Variant], n_values: &[usize]) -> Result<ConvergenceResult> {
    scenario.validate()?;
    let pairs = expand(variants, n_values);
    if pairs.is_empty() {
        return Err(Error::invalid("no variants to run"));
    }
    let truth = scenario.load_image()?;
    let psf = scenario.psf.build()?;
    let observations: Vec<_> = (0..scenario.trials)
        .map(|t| scenario.observe(&psf, &truth.image, t))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|c| (0..scenario.trials).map(move |t| (c, t)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(c, t)| {
            let (variant, n) = pairs[c];
            let mut cfg = scenario.solver_config(variant, scenario.iterations);
            cfg.n = n;
            let b = &observations[t];
            let problem = Problem::new(&psf, b, &cfg)?;
            let out = solve(&problem, b, Some(&truth.image), (&cfg).into())?;
            Ok((problem.p(), out.trace, out.status))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut curves: Vec<Curve> = pairs
        .iter()
        .map(|&(variant, n)| Curve {
            variant,
            n,
            p: 1.0,
            traces: Vec::new(),
            statuses: Vec::new(),
        })
        .collect();
    for (&(c, _), (p, trace, status)) in jobs.iter().zip(runs) {
        curves[c].p = p;
        curves[c].traces.push(trace);
        curves[c].statuses.push(status);
    }
    Ok(ConvergenceResult {
        image: truth.describe(),
        curves,
    })
}

/// One run of `variant` on trial `trial` of the scenario.
pub fn run_single(scenario: &Scenario, variant: Variant, iterations: usize, trial: usize) -> Result<RunOutcome> {
    let truth = scenario.load_image()?;
    let psf = scenario.psf.build()?;
    let b = scenario.observe(&psf, &truth.image, trial)?;
    run_solver(&scenario.solver_config(variant, iterations), &psf, &b, &b, Some(&truth.image))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ImageSpec;

    fn small(sigma: f64) -> Scenario {
        let mut s = Scenario::new(ImageSpec::Synthetic { seed: 5 }, sigma);
        s.size = 32;
        s.wavelet_levels = 3;
        s.trials = 2;
        s.iterations = 20;
        s.record_time = false;
        s
    }

    #[test]
    fn header_only_for_zero_iterations() {
        let mut s = small(1e-2);
        s.trials = 1;
        s.iterations = 0;
        let r = run_convergence_test(&s, &[Variant::Fista], &[8]).unwrap();
        assert_eq!(r.curves[0].to_csv(), format!("{CONVERGENCE_HEADER}\n"));
    }

    #[test]
    fn csv_shape_and_determinism() {
        let s = small(1e-2);
        let a = run_convergence_test(&s, &[Variant::Fista, Variant::Efista], &[4, 8]).unwrap();
        assert_eq!(a.curves.len(), 3);
        let labels: Vec<_> = a.curves.iter().map(|c| c.label()).collect();
        assert_eq!(labels, ["FISTA", "EFISTA_W4", "EFISTA_W8"]);
        let csv = a.curves[2].to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 2 * 20 + 20);
        assert!(lines[1].starts_with("1,EFISTA,8,"));
        assert!(lines.last().unwrap().contains(",mean,"));
        assert!(lines[1].ends_with(','), "seconds column is empty without timing");
        let b = run_convergence_test(&s, &[Variant::Fista, Variant::Efista], &[4, 8]).unwrap();
        assert_eq!(csv, b.curves[2].to_csv());
    }

    #[test]
    fn noiseless_fista_decreases() {
        let mut s = small(0.0);
        s.iterations = 40;
        let r = run_convergence_test(&s, &[Variant::Fista], &[1]).unwrap();
        let obj = r.curves[0].mean_objectives();
        assert!(obj.last().unwrap() < &(obj[0] * 0.5));
        let trace = &r.curves[0].traces[0];
        assert!(trace.final_objective() <= trace.min_objective().unwrap() * (1.0 + 1e-2));
    }

    #[test]
    fn mean_handles_short_traces() {
        let r = run_convergence_test(&small(1e-2), &[Variant::Ista], &[]).unwrap();
        let mean = r.curves[0].mean();
        let t = &r.curves[0].traces;
        let expect = (t[0].records()[4].objective + t[1].records()[4].objective) / 2.0;
        assert_eq!(mean[4].objective, expect);
        assert_eq!(mean[4].count, 2);
    }
}
