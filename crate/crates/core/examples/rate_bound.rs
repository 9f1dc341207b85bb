//! Check `F(x_k) - F(x*) <= (2 / eta) ||x_0 - x*||^2_{W^-1} / (k + 1)^2` for
//! EFISTA on a noiseless problem, with `x*` from a long FISTA run.
//!
//! cargo run --release --example rate_bound

use efista::experiments::synthetic_image;
use efista::linop::{blur_apply, Psf};
use efista::solvers::{rate_check, run_solver, Problem, SolverConfig, Variant};

fn main() -> efista::Result<()> {
    let psf = Psf::gaussian(7, 4.0)?;
    let b = blur_apply(&psf, &synthetic_image(64, 64, 1))?;
    let config = |variant, iters| SolverConfig {
        max_iters: iters,
        record_psnr: false,
        record_time: false,
        ..SolverConfig::new(variant).with_levels(6)
    };
    let reference = run_solver(&config(Variant::Fista, 5000), &psf, &b, &b, None)?;
    for n in [1, 4, 8] {
        let cfg = config(Variant::Efista, 200).with_order(n);
        let run = run_solver(&cfg, &psf, &b, &b, None)?;
        let report = rate_check(&run.trace, &Problem::new(&psf, &b, &cfg)?, &b, &reference.x)?;
        println!("W_{n}: {report}");
    }
    Ok(())
}
