//! Mean objective per iteration for FISTA, IFISTA and EFISTA at weighting
//! orders 4 and 8.
//!
//! cargo run --release --example convergence_curves -- [trials]

use efista::experiments::{run_convergence_test, ImageSpec, Scenario};
use efista::solvers::Variant;

fn main() -> efista::Result<()> {
    let trials = std::env::args().nth(1).and_then(|t| t.parse().ok()).unwrap_or(3);
    let mut scenario = Scenario::new(ImageSpec::named("cameraman"), 1e-2);
    scenario.iterations = 50;
    scenario.trials = trials;
    let result = run_convergence_test(&scenario, &[Variant::Fista, Variant::Ifista, Variant::Efista], &[4, 8])?;
    println!("{} over {trials} trials", result.image);

    let curves: Vec<_> = result.curves.iter().map(|c| (c.label(), c.mean_objectives())).collect();
    print!("{:>4}", "k");
    for (label, _) in &curves {
        print!(" {label:>12}");
    }
    println!();
    for k in [1, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50] {
        print!("{k:>4}");
        for (_, obj) in &curves {
            print!(" {:>12.5e}", obj[k - 1]);
        }
        println!();
    }
    Ok(())
}
