//! Blur an image with the reflexive-boundary Gaussian, check the adjoint and
//! read off the DCT spectrum of `A^T A`.
//!
//! cargo run --release --example blur_and_spectrum

use efista::experiments::synthetic_image;
use efista::linop::{blur_adjoint, blur_apply, normal_apply, spectral_decompose, Psf};
use efista::Image;

fn main() -> efista::Result<()> {
    let psf = Psf::gaussian(7, 4.0)?;
    let x = synthetic_image(256, 256, 0);
    let bx = blur_apply(&psf, &x)?;
    println!("blurred: mean {:.6} (input {:.6})", bx.mean(), x.mean());

    let flat = Image::filled(256, 256, 0.3);
    println!("constant image moves by {:.1e}", blur_apply(&psf, &flat)?.max_abs_diff(&flat));

    let y = synthetic_image(256, 256, 1);
    let lhs = bx.dot(&y);
    let rhs = x.dot(&blur_adjoint(&psf, &y)?);
    println!("<Ax, y> - <x, A^T y> = {:.2e}", lhs - rhs);

    let spec = spectral_decompose(&psf, 1.0, 256, 256)?;
    let diff = spec.apply(&x)?.max_abs_diff(&normal_apply(&psf, &x)?);
    println!("lambda_max(A^T A) = {:.9}", spec.lambda_max_ata());
    println!("smallest eigenvalue = {:.3e}", spec.mu().iter().copied().fold(f64::INFINITY, f64::min));
    println!("spectral vs convolution A^T A x: {diff:.2e}");
    Ok(())
}
