//! Benchmark harness: noisy observations, PSNR, convergence curves,
//! threshold-scale sweeps and the PSNR table.

mod convergence;
mod images;
mod metrics;
mod scenario;
mod sweep;
mod table;

pub use convergence::{
    mean_trace, run_convergence_test, run_single, ConvergenceResult, Curve, MeanPoint, CONVERGENCE_HEADER,
};
pub use images::{
    find_image, image_dirs, load_image_file, load_test_image, synthetic_image, ImageOrigin, TestImage,
    IMAGE_DIR_ENV, STANDARD_IMAGES,
};
pub use metrics::{add_awgn, psnr, MSE_FLOOR, PSNR_CAP};
pub use scenario::{standard_budget, ImageSpec, PsfSpec, Scenario};
pub use sweep::{best_p, first_stable_p, p_grid, run_p_sweep, sweep_csv, SweepPoint, DIVERGENCE_TOL, SWEEP_HEADER};
pub use table::{run_psnr_table, ResultRow, ResultTable, TABLE_HEADER, TABLE_VARIANTS};
