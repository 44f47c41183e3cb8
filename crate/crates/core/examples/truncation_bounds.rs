//! Certified brackets on the casino's return probability from finite windows.
//! States leaving the window count as successes, or are valued by the `V₁`
//! supermartingale, which tightens the upper bound sharply.

use streett::approx::{bounded_reach_interval, bounded_reach_interval_with_majorant};
use streett::certificate::casino;
use streett::families::{casino_return_probability, lending_casino};
use streett::scalar::{rat, rational_to_f64};
use streett::{Distribution, Region, StateId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps = rat(1, 5);
    let chain = lending_casino(eps.clone())?;
    let solvency = Region::int_at_least("Solvency", 0);
    let from = Distribution::dirac(StateId::Int(-1));
    println!("exact: {}", casino_return_probability(&eps, -1));

    for n in [2, 5, 10, 14, 30] {
        let window: Vec<StateId> = (-n..=1).map(StateId::Int).collect();
        let plain = bounded_reach_interval(&chain, &solvency, &window, &from)?;
        let tight = bounded_reach_interval_with_majorant(&chain, &solvency, &window, &from, &casino::v1(eps.clone()))?;
        println!(
            "N={n:>2}  plain [{:.6}, {:.6}]  majorant [{:.6}, {:.6}]  width {:.2e}",
            rational_to_f64(&plain.lower),
            rational_to_f64(&plain.upper),
            rational_to_f64(&tight.lower),
            rational_to_f64(&tight.upper),
            rational_to_f64(&tight.width()),
        );
    }
    Ok(())
}
