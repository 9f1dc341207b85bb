use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solvers::{solve, Problem, RunControl, Variant};

use super::scenario::Scenario;

pub const TABLE_HEADER: &str = "image,sigma,algorithm,iters,psnr_mean,psnr_std,secs_mean";

/// Algorithms in table order.
pub const TABLE_VARIANTS: [Variant; 3] = [Variant::Fista, Variant::Ifista, Variant::Efista];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub image: String,
    /// Whether the genuine image file was used.
    pub genuine: bool,
    pub sigma: f64,
    pub algorithm: Variant,
    pub iters: usize,
    pub psnr_mean: f64,
    /// Sample standard deviation over trials (0 for a single trial).
    pub psnr_std: f64,
    pub secs_mean: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn get(&self, image: &str, sigma: f64, algorithm: Variant) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.image == image && r.sigma == sigma && r.algorithm == algorithm)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TABLE_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.16e},{:.16e},{:.16e}",
                r.image, r.sigma, r.algorithm, r.iters, r.psnr_mean, r.psnr_std, r.secs_mean
            );
        }
        out
    }

    /// Fixed-width text rendering, one line per row.
    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.image.len() + 1).max().unwrap_or(5).max(6);
        let mut out = format!(
            "{:<width$} {:>8} {:<7} {:>5} {:>10} {:>8} {:>9}\n",
            "image", "sigma", "alg", "iters", "psnr (dB)", "std", "secs"
        );
        for r in &self.rows {
            let name = if r.genuine { r.image.clone() } else { format!("{}*", r.image) };
            let _ = writeln!(
                out,
                "{:<width$} {:>8.0e} {:<7} {:>5} {:>10.2} {:>8.3} {:>9.3}",
                name, r.sigma, r.algorithm.name(), r.iters, r.psnr_mean, r.psnr_std, r.secs_mean
            );
        }
        if self.rows.iter().any(|r| !r.genuine) {
            out.push_str("* stand-in image (substitute file or synthetic)\n");
        }
        out
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// FISTA at `K` and IFISTA/EFISTA at `K / iter_divisor` for every scenario.
pub fn run_psnr_table(scenarios: &[Scenario]) -> Result<ResultTable> {
    if scenarios.is_empty() {
        return Err(Error::invalid("no scenarios given"));
    }
    let mut table = ResultTable::default();
    for sc in scenarios {
        sc.validate()?;
        let truth = sc.load_image()?;
        let psf = sc.psf.build()?;
        let observations: Vec<_> = (0..sc.trials)
            .map(|t| sc.observe(&psf, &truth.image, t))
            .collect::<Result<_>>()?;

        for variant in TABLE_VARIANTS {
            let iters = if variant == Variant::Fista {
                sc.iterations
            } else {
                sc.reduced_iterations()
            };
            let cfg = sc.solver_config(variant, iters);
            let control = RunControl {
                max_iters: iters,
                rel_tol: None,
                record_psnr: true,
                record_time: true,
            };
            let results = observations
                .par_iter()
                .map(|b| {
                    let problem = Problem::new(&psf, b, &cfg)?;
                    let out = solve(&problem, b, Some(&truth.image), control)?;
                    let psnr = out.trace.final_psnr().expect("truth supplied");
                    let secs = out.trace.records().last().and_then(|r| r.seconds).unwrap_or(0.0);
                    Ok((psnr, secs))
                })
                .collect::<Result<Vec<_>>>()?;
            let psnrs: Vec<f64> = results.iter().map(|r| r.0).collect();
            let (psnr_mean, psnr_std) = mean_std(&psnrs);
            let secs_mean = results.iter().map(|r| r.1).sum::<f64>() / results.len() as f64;
            table.rows.push(ResultRow {
                image: truth.id.clone(),
                genuine: truth.is_genuine(),
                sigma: sc.noise_sigma,
                algorithm: variant,
                iters,
                psnr_mean,
                psnr_std,
                secs_mean,
                trials: sc.trials,
            });
        }
    }
    Ok(table)
}
