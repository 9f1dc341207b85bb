//! ISTA, FISTA, IFISTA and EFISTA as one proximal-gradient engine.
//!
//! Every variant runs [`efista_step`]; the variant only decides whether
//! momentum is applied, the weighting order `n` and the threshold scale `p`.

mod config;
mod diagnostics;
mod run;
mod step;
mod trace;

pub use config::{SolverConfig, Variant};
pub use diagnostics::{rate_check, surrogate_q, wnorm_sq, RateReport};
pub use run::{run_solver, solve, RunControl, RunOutcome, RunStatus, BLOWUP_FACTOR};
pub use step::{efista_step, momentum_alpha, momentum_extrapolate, objective, Problem, SolverState};
pub use trace::{IterationRecord, IterationTrace};
