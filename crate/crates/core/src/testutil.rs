use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::Image;

pub(crate) struct Lcg(ChaCha8Rng);

impl Lcg {
    pub(crate) fn new(seed: u64) -> Self {
        Lcg(ChaCha8Rng::seed_from_u64(seed))
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.0.random()
    }

    pub(crate) fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.random_range(lo..hi)
    }
}

/// Uniform `[0, 1)` image, reproducible per seed.
pub(crate) fn random_image(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = Lcg::new(seed);
    Image::from_fn(width, height, |_, _| rng.uniform(0.0, 1.0))
}
