//! File formats and the command implementations behind the `efista` binary.

mod commands;
mod config;
mod pgm;

pub use commands::{run_command, Command, Report, EXIT_DIVERGED};
pub use config::{RunConfig, KEYS};
pub use pgm::{encode_pgm, parse_pgm, quantize, read_pgm, write_pgm, write_pgm_with, PgmEncoding, MAX_MAXVAL};
