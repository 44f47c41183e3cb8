//! Exact Streett probabilities, BSCC classification and Orey's criterion on
//! the three small reference chains.

use streett::chain::Region;
use streett::families::{fig2, fig3, fig5};
use streett::oracle::Oracle;
use streett::{StateId, StreettCondition};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, chain) in [("fig2", fig2()), ("fig3", fig3()), ("fig5", fig5())] {
        let labels = chain.labeling().expect("reference chains are labelled").clone();
        let (la, lb) = (labels.clone(), labels);
        let a = Region::from_predicate("A", move |s| la.label(s).contains("a"));
        let b = Region::from_predicate("B", move |s| lb.label(s).contains("b"));
        let cond = StreettCondition::new(vec![(a.clone(), b.clone())]);

        let oracle = Oracle::new(&chain)?;
        println!("{name}: P(Fin A ∪ Inf B) = {}", oracle.streett_probability(&cond));
        for bscc in oracle.bsccs(&cond) {
            let members: Vec<String> = bscc.states.iter().map(StateId::to_string).collect();
            println!("  BSCC {{{}}} accepting: {}", members.join(", "), bscc.is_accepting());
        }
        let (holds, p) = oracle.check_orey(&a, &b);
        println!("  every A-visit reaches B again: {holds} (worst return probability {p})");
    }
    Ok(())
}
