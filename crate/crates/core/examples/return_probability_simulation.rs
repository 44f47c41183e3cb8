//! Seeded simulation of the casino with `V₁` recorded along each run: the
//! value drifts towards zero as the gambler sinks into debt.
//!
//! `cargo run --release --example return_probability_simulation -- out.csv`

use streett::approx::{reference_eps, simulate_return_probability, visit_frequency, REFERENCE_SEED};
use streett::certificate::casino;
use streett::families::lending_casino;
use streett::Region;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps = reference_eps();
    let chain = lending_casino(eps.clone())?;
    let series = simulate_return_probability(&chain, &casino::v1(eps), 20_000, 8, REFERENCE_SEED, 1_000)?;

    for point in series.mean_curve().iter().step_by(4) {
        println!("n = {:>6}  mean V₁ = {:.5}", point.0, point.1);
    }
    println!("finals: {:?}", series.finals());

    if let Some(path) = std::env::args().nth(1) {
        series.write_csv(std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }

    let solvency = Region::int_at_least("Solvency", 0);
    let share = visit_frequency(&chain, &solvency, 20_000, 8, REFERENCE_SEED)?;
    println!("share of time solvent: {share:.4?}");
    Ok(())
}
