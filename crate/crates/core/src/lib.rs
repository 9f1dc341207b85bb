pub mod cli;
pub mod error;
pub mod experiments;
pub mod image;
pub mod linop;
pub mod oracle;
pub mod solvers;
pub mod wavelet;
pub mod weighting;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use image::Image;
