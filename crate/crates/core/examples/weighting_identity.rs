//! The weighting matrix `W_n` folds `n` gradient steps into one:
//! `(I - eta A^T A)^n x = x - eta W_n A^T A x`.
//!
//! cargo run --release --example weighting_identity

use efista::experiments::synthetic_image;
use efista::linop::{normal_apply, spectral_decompose, Psf};
use efista::weighting::{apply_weighted_gradient_spectral, binomial_filter_weights, build_filter, lambda_max_w};

fn main() -> efista::Result<()> {
    let psf = Psf::gaussian(7, 4.0)?;
    let spec = spectral_decompose(&psf, 1.0, 256, 256)?;
    let x = synthetic_image(256, 256, 3);
    let atax = normal_apply(&psf, &x)?;

    println!("{:>3} {:>14} {:>12}  coefficients", "n", "lambda_max(W)", "residual");
    for n in [1, 2, 4, 8] {
        let mut lhs = x.clone();
        for _ in 0..n {
            lhs = lhs.sub(&normal_apply(&psf, &lhs)?);
        }
        let filter = build_filter(&spec, n);
        let rhs = x.sub(&apply_weighted_gradient_spectral(&filter, &atax)?);
        let residual = lhs.sub(&rhs).norm() / x.norm();
        let coeffs = binomial_filter_weights(n)?;
        println!("{n:>3} {:>14.9} {residual:>12.2e}  {coeffs:?}", lambda_max_w(&filter));
    }
    Ok(())
}
