mod common;

use std::sync::LazyLock;

use common::{random_image, small_config};
use efista::linop::{blur_adjoint, blur_apply, dct2, gradient, idct2, normal_apply, spectral_decompose, Psf};
use efista::solvers::{
    efista_step, momentum_alpha, run_solver, surrogate_q, Problem, SolverConfig, SolverState, Variant,
};
use efista::wavelet::{analyze, prox_l1_wavelet, shrink, soft_threshold, synthesize};
use efista::weighting::{apply_weighted_gradient_nstep, apply_weighted_gradient_spectral, build_filter};
use efista::Image;
use proptest::prelude::*;

fn psf_strategy() -> impl Strategy<Value = Psf> {
    (prop::sample::select(vec![1usize, 3, 5, 7]), 0.3f64..5.0).prop_map(|(size, sigma)| Psf::gaussian(size, sigma).unwrap())
}

/// Arbitrary non-negative kernel, not necessarily symmetric.
fn any_psf_strategy() -> impl Strategy<Value = Psf> {
    prop::sample::select(vec![1usize, 3, 5])
        .prop_flat_map(|size| prop::collection::vec(0.01f64..1.0, size * size).prop_map(move |t| (size, t)))
        .prop_map(|(size, taps)| Psf::new(size, taps).unwrap())
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (8usize..20, 8usize..20)
}

fn rel(a: &Image, b: &Image) -> f64 {
    a.sub(b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn blur_adjointness(psf in any_psf_strategy(), (w, h) in dims(), seed in any::<u64>()) {
        let x = random_image(w, h, seed);
        let y = random_image(w, h, seed ^ 0x5555);
        let lhs = blur_apply(&psf, &x).unwrap().dot(&y);
        let rhs = x.dot(&blur_adjoint(&psf, &y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * x.norm() * y.norm());
    }

    #[test]
    fn constant_images_are_fixed_points(psf in psf_strategy(), (w, h) in dims(), c in -2.0f64..2.0) {
        let x = Image::filled(w, h, c);
        prop_assert!(blur_apply(&psf, &x).unwrap().max_abs_diff(&x) <= 1e-12);
    }

    #[test]
    fn spectrum_reproduces_normal_operator(psf in psf_strategy(), (w, h) in dims(), eta in 0.1f64..1.0, seed in any::<u64>()) {
        let x = random_image(w, h, seed);
        let spec = spectral_decompose(&psf, eta, w, h).unwrap();
        let expect = normal_apply(&psf, &x).unwrap().scale(eta);
        prop_assert!(rel(&spec.apply(&x).unwrap(), &expect) <= 1e-10);
    }

    #[test]
    fn dct_round_trip((w, h) in dims(), seed in any::<u64>()) {
        let x = random_image(w, h, seed);
        prop_assert!(idct2(&dct2(&x)).max_abs_diff(&x) <= 1e-12);
    }

    #[test]
    fn filter_bounds(psf in psf_strategy(), (w, h) in dims(), n in 1usize..12) {
        let spec = spectral_decompose(&psf, 1.0, w, h).unwrap();
        let filter = build_filter(&spec, n);
        for (&phi, &mu) in filter.phi().iter().zip(spec.mu()) {
            prop_assert!(phi >= 1.0 - 1e-12 && phi <= n as f64 + 1e-12);
            prop_assert!(phi * mu <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn weighting_paths_agree(psf in psf_strategy(), (w, h) in dims(), n in 1usize..9, seed in any::<u64>()) {
        let x = random_image(w, h, seed);
        let b = random_image(w, h, seed.wrapping_add(1));
        let spec = spectral_decompose(&psf, 1.0, w, h).unwrap();
        let filter = build_filter(&spec, n);
        let g = gradient(&psf, &x, &b).unwrap();
        let spectral = x.sub(&apply_weighted_gradient_spectral(&filter, &g).unwrap());
        let nstep = apply_weighted_gradient_nstep(&psf, &x, &b, 1.0, n).unwrap();
        prop_assert!(rel(&spectral, &nstep) <= 1e-9);
    }

    #[test]
    fn soft_threshold_is_odd_and_contractive(a in -10.0f64..10.0, b in -10.0f64..10.0, gamma in 0.0f64..5.0) {
        prop_assert_eq!(shrink(-a, gamma), -shrink(a, gamma));
        prop_assert!((shrink(a, gamma) - shrink(b, gamma)).abs() <= (a - b).abs() + 1e-14 * (a.abs() + b.abs()));
        prop_assert!(shrink(a, gamma).abs() <= a.abs());
        let v = soft_threshold(&[a, b], gamma).unwrap();
        prop_assert_eq!(v, vec![shrink(a, gamma), shrink(b, gamma)]);
    }

    #[test]
    fn wavelet_prox_is_idempotent_at_zero(levels in 1usize..4, seed in any::<u64>()) {
        let x = random_image(32, 16, seed);
        prop_assert!(prox_l1_wavelet(&x, 0.0, levels).unwrap().max_abs_diff(&x) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn wavelet_perfect_reconstruction(size in prop::sample::select(vec![16usize, 64, 256]), seed in any::<u64>()) {
        let levels = size.trailing_zeros() as usize;
        let x = random_image(size, size, seed);
        let c = analyze(&x, levels).unwrap();
        prop_assert!(synthesize(&c).max_abs_diff(&x) <= 1e-9);
    }

    #[test]
    fn surrogate_majorizes_objective(seed in any::<u64>(), case in 0usize..6, scale in 0.0f64..3.0) {
        let (problem, b) = &MAJORIZATION_CASES[case];
        let x = random_image(16, 16, seed).scale(scale);
        let z = b.add(&random_image(16, 16, seed ^ 0xabcd).scale(scale * 0.5));
        let q = surrogate_q(&x, &z, problem).unwrap();
        let f = problem.objective(&x).unwrap();
        prop_assert!(q >= f - 1e-12 * f.abs(), "Q = {q} < F = {f}");
    }
}

static MAJORIZATION_CASES: LazyLock<Vec<(Problem, Image)>> = LazyLock::new(|| {
    let psf = Psf::gaussian(5, 2.0).unwrap();
    let b = blur_apply(&psf, &random_image(16, 16, 7)).unwrap();
    [(Variant::Fista, 1, None), (Variant::Ifista, 4, None), (Variant::Efista, 4, Some(2.5)), (Variant::Efista, 8, None), (Variant::Efista, 8, Some(1.0)), (Variant::Ista, 1, None)]
        .into_iter()
        .map(|(variant, n, p)| {
            let mut cfg = small_config(variant, 0.02, 2).with_order(n);
            cfg.p = p;
            (Problem::new(&psf, &b, &cfg).unwrap(), b.clone())
        })
        .collect()
});

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Details whose 7-tap support stays inside the image vanish on affine input.
    #[test]
    fn affine_images_have_no_interior_details(w in 6usize..20, h in 6usize..20, a in -1.0f64..1.0, bx in -1.0f64..1.0, by in -1.0f64..1.0) {
        let (w, h) = (2 * w, 2 * h);
        let x = Image::from_fn(w, h, |r, c| a + bx * c as f64 + by * r as f64);
        let c = analyze(&x, 1).unwrap();
        let interior = |i: usize, n: usize| i >= 1 && 2 * i + 4 < n;
        for r in 0..h {
            for col in 0..w {
                let (row_high, col_high) = (r >= h / 2, col >= w / 2);
                let (ri, ci) = (r % (h / 2), col % (w / 2));
                let vanishes = (col_high && interior(ci, w)) || (row_high && interior(ri, h));
                if vanishes {
                    let v = c.values()[r * w + col];
                    prop_assert!(v.abs() <= 1e-8, "({r}, {col}) = {v}");
                }
            }
        }
    }

    #[test]
    fn constant_images_have_no_details(levels in 1usize..5, value in -3.0f64..3.0) {
        let x = Image::filled(32, 32, value);
        let c = analyze(&x, levels).unwrap();
        for (i, v) in c.values().iter().enumerate() {
            if !c.is_approximation(i) {
                prop_assert!(v.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn momentum_lower_bound(k in 0usize..5000) {
        let mut alpha = 1.0;
        for _ in 0..k {
            let next = momentum_alpha(alpha);
            prop_assert!(next > alpha);
            alpha = next;
        }
        prop_assert!(alpha >= (k as f64 + 2.0) / 2.0);
    }
}

fn iterate(problem: &Problem, x0: &Image, steps: usize) -> Vec<Image> {
    let mut state = SolverState::initial(x0);
    (0..steps)
        .map(|_| {
            state = efista_step(&state, problem).unwrap();
            state.x.clone()
        })
        .collect()
}

fn reduction_instance(seed: u64) -> (Psf, Image) {
    let psf = Psf::gaussian(5, 1.5).unwrap();
    let truth = random_image(16, 16, seed);
    let b = blur_apply(&psf, &truth).unwrap().add(&random_image(16, 16, seed + 1).scale(0.01));
    (psf, b)
}

fn max_diff(a: &[Image], b: &[Image]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn efista_reduces_to_fista(seed in 0u64..1000, lambda in 1e-4f64..1e-2) {
        let (psf, b) = reduction_instance(seed);
        let fista = Problem::new(&psf, &b, &small_config(Variant::Fista, lambda, 2)).unwrap();
        let cfg = small_config(Variant::Efista, lambda, 2).with_order(1).with_p(1.0);
        let efista = Problem::new(&psf, &b, &cfg).unwrap();
        prop_assert!(max_diff(&iterate(&fista, &b, 50), &iterate(&efista, &b, 50)) <= 1e-12);
    }

    #[test]
    fn efista_reduces_to_ifista(seed in 0u64..1000, lambda in 1e-4f64..1e-2, n in 2usize..9) {
        let (psf, b) = reduction_instance(seed);
        let ifista = Problem::new(&psf, &b, &small_config(Variant::Ifista, lambda, 2).with_order(n)).unwrap();
        let cfg = small_config(Variant::Efista, lambda, 2).with_order(n).with_p(1.0);
        let efista = Problem::new(&psf, &b, &cfg).unwrap();
        prop_assert!(max_diff(&iterate(&ifista, &b, 50), &iterate(&efista, &b, 50)) <= 1e-12);
    }

    /// ISTA is FISTA without momentum: plain proximal-gradient steps.
    #[test]
    fn ista_is_momentum_free_fista(seed in 0u64..1000, lambda in 1e-4f64..1e-2) {
        let (psf, b) = reduction_instance(seed);
        let ista = Problem::new(&psf, &b, &small_config(Variant::Ista, lambda, 2)).unwrap();
        let mut x = b.clone();
        let manual: Vec<Image> = (0..50)
            .map(|_| {
                let z = x.sub(&gradient(&psf, &x, &b).unwrap());
                x = prox_l1_wavelet(&z, lambda, 2).unwrap();
                x.clone()
            })
            .collect();
        prop_assert!(max_diff(&iterate(&ista, &b, 50), &manual) <= 1e-12);
    }

    #[test]
    fn runs_are_deterministic(seed in 0u64..1000, variant in prop::sample::select(Variant::ALL.to_vec())) {
        let (psf, b) = reduction_instance(seed);
        let cfg = SolverConfig { max_iters: 30, ..small_config(variant, 3e-3, 2) };
        let truth = random_image(16, 16, seed);
        let first = run_solver(&cfg, &psf, &b, &b, Some(&truth)).unwrap();
        let second = run_solver(&cfg, &psf, &b, &b, Some(&truth)).unwrap();
        prop_assert_eq!(&first.trace, &second.trace);
        prop_assert_eq!(first.x.as_slice(), second.x.as_slice());
    }
}
