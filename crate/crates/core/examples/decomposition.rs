//! Synthesizes an absorbing-region decomposition, checks it, and runs the
//! ε-complete search over the invariants `I_k`.

use streett::certificate::check_decomposition_semantic;
use streett::families::{builtin, casino_condition};
use streett::scalar::rat;
use streett::synthesis::{default_threshold, eps_complete_search, synthesize_decomposition, synthesize_invariant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fig5 = builtin("fig5", &Default::default())?;
    let (chain, cond) = (fig5.chain, fig5.streett);

    let invariant = synthesize_invariant(&chain, &cond, 1)?;
    let witness = synthesize_decomposition(&chain, &cond, invariant, &default_threshold())?;
    let report = check_decomposition_semantic(&chain, &cond, &witness)?;
    print!("{report}");

    let eps = rat(1, 100);
    if let Some(found) = eps_complete_search(&chain, &cond, &eps, &default_threshold())? {
        println!(
            "k = {} gives bound {} against P = {} (ε = {eps})",
            found.k, found.bound, found.probability
        );
    }

    // The casino condition is a single co-Büchi pair.
    println!("casino pairs: {}", casino_condition().len());
    Ok(())
}
