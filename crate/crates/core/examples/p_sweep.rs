//! Sweep the EFISTA threshold scale `p` and report where divergence stops.
//!
//! cargo run --release --example p_sweep -- [trials]

use efista::experiments::{best_p, first_stable_p, p_grid, run_p_sweep, ImageSpec, Scenario};

fn main() -> efista::Result<()> {
    let trials = std::env::args().nth(1).and_then(|t| t.parse().ok()).unwrap_or(3);
    let mut scenario = Scenario::new(ImageSpec::named("cameraman"), 1e-2);
    scenario.iterations = 50;
    scenario.trials = trials;
    let points = run_p_sweep(&scenario, 8, &p_grid(1.0, 8.0, 0.2)?, 15)?;
    println!("{:>5} {:>14} {:>14}  diverging", "p", "F at k=15", "F at k=50");
    for s in &points {
        println!("{:>5.1} {:>14.6e} {:>14.6e}  {}", s.p, s.objective, s.final_objective, s.diverging);
    }
    println!("first stable p: {:?}", first_stable_p(&points));
    println!("best p at iteration 15: {:?}", best_p(&points));
    Ok(())
}
