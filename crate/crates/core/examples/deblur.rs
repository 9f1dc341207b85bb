//! Deblur one noisy observation with every variant and write the results.
//!
//! cargo run --release --example deblur -- [image-name] [out-dir]

use std::path::PathBuf;

use efista::cli::write_pgm;
use efista::experiments::{psnr, ImageSpec, Scenario};
use efista::solvers::{run_solver, Variant};

fn main() -> efista::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "cameraman".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| "deblur-out".into()));
    std::fs::create_dir_all(&out).map_err(|e| efista::Error::Io { path: out.clone(), source: e })?;

    let scenario = Scenario::new(ImageSpec::named(&name), 1e-2);
    let truth = scenario.load_image()?;
    let psf = scenario.psf.build()?;
    let b = scenario.observe(&psf, &truth.image, 0)?;
    println!("{}: observed {:.2} dB", truth.describe(), psnr(&b, &truth.image)?);
    write_pgm(out.join("observed.pgm"), &b)?;

    for (variant, iters) in [(Variant::Ista, 45), (Variant::Fista, 45), (Variant::Ifista, 15), (Variant::Efista, 15)] {
        let cfg = scenario.solver_config(variant, iters);
        let run = run_solver(&cfg, &psf, &b, &b, Some(&truth.image))?;
        println!(
            "{variant:<7} {iters:>3} iterations: {:.2} dB, objective {:.5e}, {:?}",
            run.trace.final_psnr().unwrap_or(f64::NAN),
            run.trace.final_objective(),
            run.status
        );
        write_pgm(out.join(format!("{}.pgm", variant.name().to_lowercase())), &run.x)?;
    }
    println!("images written to {}", out.display());
    Ok(())
}
