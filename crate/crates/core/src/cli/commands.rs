//! The four subcommands. Each writes only inside the configured output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{
    best_p, first_stable_p, p_grid, psnr, run_convergence_test, run_p_sweep, run_psnr_table, standard_budget,
    sweep_csv, Curve, Scenario, DIVERGENCE_TOL,
};
use crate::solvers::{solve, Problem, RunStatus};

use super::config::RunConfig;
use super::pgm::write_pgm;

/// Exit code for a run that blew up or turned upward.
pub const EXIT_DIVERGED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Deblur,
    Curves,
    Sweep,
    Table,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
    /// Human-readable summary, printed unless quiet.
    pub summary: String,
}

struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Output {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn text(&mut self, name: &str, contents: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, contents).map_err(|e| Error::io(&p, e))
    }
}

pub fn run_command(command: Command, cfg: &RunConfig) -> Result<Report> {
    cfg.check_paths()?;
    let mut out = Output::create(&cfg.out)?;
    let (exit_code, summary) = match command {
        Command::Deblur => deblur(cfg, &mut out)?,
        Command::Curves => curves(cfg, &mut out)?,
        Command::Sweep => sweep(cfg, &mut out)?,
        Command::Table => table(cfg, &mut out)?,
    };
    Ok(Report {
        exit_code,
        files: out.files,
        summary,
    })
}

fn default_iterations(cfg: &RunConfig) -> usize {
    cfg.iterations.unwrap_or_else(|| standard_budget(cfg.noise_sigma))
}

fn deblur(cfg: &RunConfig, out: &mut Output) -> Result<(i32, String)> {
    let iters = default_iterations(cfg);
    let sc = cfg.scenario(&cfg.image, cfg.noise_sigma, iters, 1);
    sc.validate()?;
    let truth = sc.load_image()?;
    let psf = sc.psf.build()?;
    let b = sc.observe(&psf, &truth.image, 0)?;
    let mut solver = sc.solver_config(cfg.variant, iters);
    if !cfg.variant.uses_weighting() {
        solver.n = 1;
    }
    let problem = Problem::new(&psf, &b, &solver)?;
    let run = solve(&problem, &b, Some(&truth.image), (&solver).into())?;

    write_pgm(out.path("observed.pgm"), &b)?;
    write_pgm(out.path("deblurred.pgm"), &run.x)?;
    let curve = Curve {
        variant: cfg.variant,
        n: problem.n(),
        p: problem.p(),
        traces: vec![run.trace.clone()],
        statuses: vec![run.status],
    };
    out.text("trace.csv", &curve.to_csv_trials())?;

    let diverged = run.status.is_diverged() || run.trace.is_diverging(DIVERGENCE_TOL);
    let status = match run.status {
        RunStatus::Diverged { iteration } => format!("blew up at iteration {iteration}"),
        _ if diverged => "objective turned upward".to_string(),
        RunStatus::Converged { iterations } => format!("converged after {iterations} iterations"),
        RunStatus::Completed => "completed".to_string(),
    };
    let mut summary = format!(
        "{} on {}: {} iterations, objective {:.6e}, PSNR {:.2} dB (observed {:.2} dB), p = {:.3}, {status}",
        curve.label(),
        truth.describe(),
        run.trace.len(),
        run.trace.final_objective(),
        psnr(&run.x, &truth.image)?,
        psnr(&b, &truth.image)?,
        problem.p(),
    );
    for w in &run.warnings {
        let _ = write!(summary, "\nwarning: {w}");
    }
    out.text("summary.txt", &format!("{summary}\n"))?;
    Ok((if diverged { EXIT_DIVERGED } else { 0 }, summary))
}

fn curves(cfg: &RunConfig, out: &mut Output) -> Result<(i32, String)> {
    let iters = cfg.iterations.unwrap_or(50);
    let sc = cfg.scenario(&cfg.image, cfg.noise_sigma, iters, cfg.trials.unwrap_or(10));
    let result = run_convergence_test(&sc, &cfg.variants, &cfg.n_values)?;
    let mut summary = format!("{} trials of {} on {}\n", sc.trials, iters, result.image);
    let _ = writeln!(summary, "{:<12} {:>8} {:>14} {:>10}", "curve", "p", "final F", "PSNR");
    for c in &result.curves {
        out.text(&format!("curves_{}.csv", c.label()), &c.to_csv())?;
        let last = c.mean().last().copied();
        let _ = writeln!(
            summary,
            "{:<12} {:>8.3} {:>14.6e} {:>10}{}",
            c.label(),
            c.p,
            last.map_or(f64::NAN, |m| m.objective),
            last.and_then(|m| m.psnr).map_or("-".into(), |v| format!("{v:.2}")),
            if c.any_blowup() { "  (blew up)" } else { "" }
        );
    }
    Ok((0, summary.trim_end().to_string()))
}

fn sweep(cfg: &RunConfig, out: &mut Output) -> Result<(i32, String)> {
    let iters = cfg.iterations.unwrap_or(50);
    let sc: Scenario = cfg.scenario(&cfg.image, cfg.noise_sigma, iters, cfg.trials.unwrap_or(10));
    let grid = p_grid(cfg.p_min, cfg.p_max, cfg.p_step)?;
    let points = run_p_sweep(&sc, cfg.n, &grid, cfg.probe_iter)?;
    out.text("sweep.csv", &sweep_csv(&points))?;
    let fmt = |p: Option<f64>| p.map_or("none".to_string(), |v| format!("{v}"));
    let summary = format!(
        "p sweep with n = {} over {} values: first stable p = {}, best p at iteration {} = {}",
        cfg.n,
        points.len(),
        fmt(first_stable_p(&points)),
        cfg.probe_iter,
        fmt(best_p(&points)),
    );
    Ok((0, summary))
}

fn table(cfg: &RunConfig, out: &mut Output) -> Result<(i32, String)> {
    let mut scenarios = Vec::new();
    for image in &cfg.images {
        for &sigma in &cfg.sigmas {
            let iters = cfg.iterations.unwrap_or_else(|| standard_budget(sigma));
            scenarios.push(cfg.scenario(image, sigma, iters, cfg.trials.unwrap_or(10)));
        }
    }
    let table = run_psnr_table(&scenarios)?;
    out.text("table.csv", &table.to_csv())?;
    let text = table.to_text();
    out.text("table.txt", &text)?;
    Ok((0, text.trim_end().to_string()))
}
