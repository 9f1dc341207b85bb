use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use efista::cli::{run_command, Command, RunConfig};

#[derive(Parser)]
#[command(version, about = "Wavelet-regularized deblurring with ISTA, FISTA, IFISTA and EFISTA")]
struct Args {
    #[command(subcommand)]
    command: Cmd,
    /// Run configuration (`key = value` lines).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Noise seed; overrides `seed` in the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Deblur one observation and write the image, trace and summary.
    Deblur,
    /// Objective-versus-iteration curves averaged over trials.
    Curves,
    /// Sweep the EFISTA threshold scale p.
    Sweep,
    /// PSNR table over images and noise levels.
    Table,
}

fn run(args: &Args) -> efista::Result<i32> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let command = match args.command {
        Cmd::Deblur => Command::Deblur,
        Cmd::Curves => Command::Curves,
        Cmd::Sweep => Command::Sweep,
        Cmd::Table => Command::Table,
    };
    let report = run_command(command, &cfg)?;
    if !args.quiet {
        println!("{}", report.summary);
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
