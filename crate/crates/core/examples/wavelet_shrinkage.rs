//! CDF 9/7 analysis, synthesis and wavelet-domain soft thresholding.
//!
//! cargo run --release --example wavelet_shrinkage

use efista::experiments::{add_awgn, psnr, synthetic_image};
use efista::wavelet::{analyze, l1_norm_coeffs, prox_l1_wavelet, synthesize};

fn main() -> efista::Result<()> {
    let x = synthetic_image(256, 256, 4);
    let c = analyze(&x, 8)?;
    println!("reconstruction error {:.2e}", synthesize(&c).max_abs_diff(&x));
    println!("approximation band {:?}", c.approximation_dims());
    let small = c.values().iter().filter(|v| v.abs() < 1e-2).count();
    println!("{:.1}% of coefficients below 1e-2, l1 = {:.2}", 100.0 * small as f64 / c.values().len() as f64, l1_norm_coeffs(&c));

    let noisy = add_awgn(&x, 0.05, 7)?;
    println!("noisy: {:.2} dB", psnr(&noisy, &x)?);
    for gamma in [0.01, 0.03, 0.05, 0.1] {
        let denoised = prox_l1_wavelet(&noisy, gamma, 8)?;
        println!("gamma {gamma:<5} {:.2} dB", psnr(&denoised, &x)?);
    }
    Ok(())
}
