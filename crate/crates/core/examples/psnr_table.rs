//! PSNR table: FISTA at K iterations against IFISTA and EFISTA at K/3.
//!
//! cargo run --release --example psnr_table -- [trials]
//!
//! Images not found on disk are replaced by synthetic stand-ins and marked `*`.

use efista::experiments::{run_psnr_table, ImageSpec, Scenario, STANDARD_IMAGES};

fn main() -> efista::Result<()> {
    let trials = std::env::args().nth(1).and_then(|t| t.parse().ok()).unwrap_or(2);
    let scenarios: Vec<Scenario> = STANDARD_IMAGES
        .iter()
        .flat_map(|name| {
            [1e-2, 1e-3].map(|sigma| Scenario {
                trials,
                ..Scenario::new(ImageSpec::named(name), sigma)
            })
        })
        .collect();
    print!("{}", run_psnr_table(&scenarios)?.to_text());
    Ok(())
}
