use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::image::Image;

/// Returned when the mean squared error is below [`MSE_FLOOR`].
pub const PSNR_CAP: f64 = 200.0;
pub const MSE_FLOOR: f64 = 1e-20;

/// Peak signal-to-noise ratio in dB with peak 1.
pub fn psnr(x: &Image, reference: &Image) -> Result<f64> {
    x.same_dims(reference)?;
    let mse = x.sub(reference).norm_sq() / x.len() as f64;
    if mse < MSE_FLOOR {
        return Ok(PSNR_CAP);
    }
    Ok(-10.0 * mse.log10())
}

/// `x + sigma * g` with `g` i.i.d. standard normal drawn from ChaCha8 seeded by `seed`.
pub fn add_awgn(x: &Image, sigma: f64, seed: u64) -> Result<Image> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("noise sigma must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(x.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = x
        .as_slice()
        .iter()
        .map(|&v| {
            let g: f64 = StandardNormal.sample(&mut rng);
            v + sigma * g
        })
        .collect();
    Ok(Image::from_raw(x.width(), x.height(), data))
}
