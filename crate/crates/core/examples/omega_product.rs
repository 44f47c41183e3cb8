//! Product of a labelled chain with a deterministic Streett automaton that
//! remembers the last label seen.

use std::collections::BTreeSet;

use streett::families::fig5;
use streett::oracle::streett_probability;
use streett::{product, Dsa};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chain = fig5();
    let track = |_: &str, letter: &BTreeSet<String>| {
        if letter.contains("a") {
            "qa".to_string()
        } else if letter.contains("b") {
            "qb".to_string()
        } else {
            "qn".to_string()
        }
    };
    let dsa = Dsa::from_fn(&["qn", "qa", "qb"], "qn", &["a", "b"], track, vec![(vec!["qa"], vec!["qb"])])?;

    let word: Vec<BTreeSet<String>> = ["a", "", "b"]
        .iter()
        .map(|l| l.split(',').filter(|x| !x.is_empty()).map(String::from).collect())
        .collect();
    println!("run on a·∅·b: {:?}", dsa.run(&word)?);

    let (prod, cond) = product(&chain, &dsa)?;
    println!(
        "product has {} states; P(accept) = {}",
        prod.states()?.len(),
        streett_probability(&prod, &cond)?
    );
    Ok(())
}
