#![allow(dead_code)]

use efista::linop::Psf;
use efista::oracle::{dense_wavelet, dense_wn, densify_blur, to_vector, DenseProblem};
use efista::solvers::{Problem, SolverConfig, Variant};
use efista::Image;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_image(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::from_fn(width, height, |_, _| rng.random_range(0.0..1.0))
}

/// A 3x3 kernel that is not flip-symmetric in either axis.
pub fn skewed_psf() -> Psf {
    Psf::new(3, vec![0.05, 0.1, 0.0, 0.2, 0.3, 0.05, 0.0, 0.15, 0.15]).unwrap()
}

/// Dense mirror of a prepared fast-path problem.
pub fn dense_problem(problem: &Problem) -> DenseProblem {
    let (w, h) = problem.observation().dims();
    let a = densify_blur(problem.psf(), w, h).unwrap();
    let wmat = if problem.n() == 1 {
        DMatrix::identity(w * h, w * h)
    } else {
        dense_wn(&a, problem.eta(), problem.n()).unwrap().matrix
    };
    DenseProblem {
        a,
        w: wmat,
        wavelet: dense_wavelet(w, h, problem.levels()).unwrap(),
        b: to_vector(problem.observation()),
        eta: problem.eta(),
        lambda: problem.lambda(),
        p: problem.p(),
        momentum: problem.momentum(),
    }
}

pub fn small_config(variant: Variant, lambda: f64, levels: usize) -> SolverConfig {
    let mut cfg = SolverConfig::new(variant).with_lambda(lambda).with_levels(levels);
    cfg.record_time = false;
    cfg
}
