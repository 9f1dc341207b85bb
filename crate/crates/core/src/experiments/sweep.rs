use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solvers::{solve, IterationTrace, Problem, Variant};

use super::convergence::mean_trace;
use super::scenario::Scenario;

pub const SWEEP_HEADER: &str = "p,probe_iter,objective,final_objective,min_objective,diverging";

/// A mean trace counts as diverging once its last objective exceeds its
/// minimum by this relative margin.
pub const DIVERGENCE_TOL: f64 = 1e-3;

/// Mean EFISTA behaviour for one threshold scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub p: f64,
    pub probe_iter: usize,
    /// Mean objective at `probe_iter`.
    pub objective: f64,
    pub final_objective: f64,
    pub min_objective: f64,
    /// Upturn in the mean trace or a blown-up trial.
    pub diverging: bool,
}

/// `1.0, 1.2, ..., 8.0`-style grid, inclusive of `hi` up to rounding.
pub fn p_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("bad p grid {lo}..{hi} step {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    // Round to the step's decimal precision so 1.2 prints as 1.2.
    Ok((0..count).map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9).collect())
}

/// EFISTA with weighting order `n` for each `p`, over `scenario.iterations`.
pub fn run_p_sweep(scenario: &Scenario, n: usize, p_values: &[f64], probe_iter: usize) -> Result<Vec<SweepPoint>> {
    scenario.validate()?;
    if probe_iter == 0 || probe_iter > scenario.iterations {
        return Err(Error::invalid(format!(
            "probe iteration {probe_iter} outside 1..={}",
            scenario.iterations
        )));
    }
    let truth = scenario.load_image()?;
    let psf = scenario.psf.build()?;
    let observations: Vec<_> = (0..scenario.trials)
        .map(|t| scenario.observe(&psf, &truth.image, t))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..p_values.len())
        .flat_map(|i| (0..scenario.trials).map(move |t| (i, t)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(i, t)| {
            let mut cfg = scenario.solver_config(Variant::Efista, scenario.iterations);
            cfg.n = n;
            cfg.p = Some(p_values[i]);
            cfg.record_psnr = false;
            cfg.record_time = false;
            let b = &observations[t];
            let problem = Problem::new(&psf, b, &cfg)?;
            let out = solve(&problem, b, None, (&cfg).into())?;
            Ok((out.trace, out.status.is_diverged()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut grouped: Vec<(Vec<IterationTrace>, bool)> = vec![(Vec::new(), false); p_values.len()];
    for (&(i, _), (trace, blown)) in jobs.iter().zip(runs) {
        grouped[i].0.push(trace);
        grouped[i].1 |= blown;
    }

    Ok(p_values
        .iter()
        .zip(grouped)
        .map(|(&p, (traces, blown))| {
            let mean = mean_trace(&traces);
            let objective = mean.get(probe_iter - 1).map_or(f64::INFINITY, |m| m.objective);
            let final_objective = mean.last().map_or(f64::INFINITY, |m| m.objective);
            let min_objective = mean.iter().map(|m| m.objective).fold(f64::INFINITY, f64::min);
            let upturn = final_objective > min_objective + DIVERGENCE_TOL * min_objective.abs();
            SweepPoint {
                p,
                probe_iter,
                objective,
                final_objective,
                min_objective,
                diverging: blown || upturn || mean.len() < scenario.iterations,
            }
        })
        .collect())
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for s in points {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{}",
            s.p, s.probe_iter, s.objective, s.final_objective, s.min_objective, s.diverging
        );
    }
    out
}

/// Smallest `p` from which every larger swept `p` is also non-diverging.
pub fn first_stable_p(points: &[SweepPoint]) -> Option<f64> {
    let mut sorted: Vec<&SweepPoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.p.total_cmp(&b.p));
    let mut stable = None;
    for s in sorted.iter().rev() {
        if s.diverging {
            break;
        }
        stable = Some(s.p);
    }
    stable
}

/// The `p` with the lowest objective at the probe iteration.
pub fn best_p(points: &[SweepPoint]) -> Option<f64> {
    points
        .iter()
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .map(|s| s.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ImageSpec;

    fn point(p: f64, objective: f64, diverging: bool) -> SweepPoint {
        SweepPoint {
            p,
            probe_iter: 15,
            objective,
            final_objective: objective,
            min_objective: objective,
            diverging,
        }
    }

    #[test]
    fn grid() {
        let g = p_grid(1.0, 8.0, 0.2).unwrap();
        assert_eq!(g.len(), 36);
        assert_eq!(g[1], 1.2);
        assert_eq!(*g.last().unwrap(), 8.0);
        assert!(p_grid(2.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn summaries() {
        let pts = [
            point(1.0, 5.0, true),
            point(2.0, 3.0, false),
            point(3.0, 4.0, true),
            point(4.0, 2.0, false),
            point(5.0, 2.5, false),
        ];
        assert_eq!(first_stable_p(&pts), Some(4.0));
        assert_eq!(best_p(&pts), Some(4.0));
        assert_eq!(first_stable_p(&[point(1.0, 1.0, true)]), None);
    }

    #[test]
    fn p_one_matches_ifista_and_csv_shape() {
        let mut s = Scenario::new(ImageSpec::Synthetic { seed: 2 }, 1e-2);
        s.size = 32;
        s.wavelet_levels = 3;
        s.trials = 2;
        s.iterations = 12;
        let pts = run_p_sweep(&s, 8, &[1.0, 4.0], 6).unwrap();
        let csv = sweep_csv(&pts);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("1,6,"));

        let ifista = crate::experiments::run_convergence_test(
            &Scenario { record_time: false, ..s.clone() },
            &[Variant::Ifista],
            &[8],
        )
        .unwrap();
        assert_eq!(pts[0].objective, ifista.curves[0].mean_objectives()[5]);
        assert!(run_p_sweep(&s, 8, &[1.0], 13).is_err());
    }
}
