//! Supermartingale certificates for the lending casino, checked on a finite
//! window, and a broken decomposition loaded from disk.

use streett::certificate::{
    casino, Checker, DecompositionWitness, MonotoneScalarFunction, Role, Rule1Bundle, Rule1Pair, Rule2Bundle,
    Rule2Pair, ValueFunction, Window,
};
use streett::chain::Region;
use streett::families::{casino_condition, lending_casino};
use streett::model::{check_certificate, load_certificate, load_model};
use streett::scalar::{int, rat, Scalar};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps = rat(1, 5);
    let chain = lending_casino(eps.clone())?;
    let cond = casino_condition();
    let solvency = Region::int_at_least("Solvency", 0);
    let debt = Region::int_below("Debt", 0);
    let checker = Checker::new(&chain).with_window(Window::int_range(-50, 50));

    print!("{}", checker.qual_safety(&solvency, &debt, &casino::v1(eps.clone()))?);

    let witness = DecompositionWitness {
        invariant: Region::all(),
        absorbing: vec![debt],
    };
    let grid: Vec<Scalar> = [0, 1, 2, 5, 10, 51].into_iter().map(|r| Scalar::Exact(int(r))).collect();

    let rule1 = Rule1Bundle {
        witness: witness.clone(),
        v0: ValueFunction::zero(),
        pairs: vec![Rule1Pair {
            v: casino::v1(eps.clone()),
            w: casino::max_plus_one(),
            u: casino::max_plus_one_rank(),
            gamma: None,
        }],
    };
    print!("{}", checker.rule1(&cond, &rule1, &grid)?);

    let rule2 = Rule2Bundle {
        witness,
        v0: ValueFunction::zero(),
        pairs: vec![Rule2Pair {
            v: casino::v1(eps),
            w: casino::max_plus_one(),
            d: MonotoneScalarFunction::constant(Role::Decrease, Scalar::one()),
            p: MonotoneScalarFunction::constant(Role::Probability, Scalar::Exact(rat(1, 2))),
            gamma: None,
        }],
    };
    print!("{}", checker.rule2(&cond, &rule2, &grid)?);

    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let model = load_model(format!("{dir}/fig3.json"))?;
    let bad = load_certificate(format!("{dir}/decomposition-bad.json"))?;
    print!("{}", check_certificate(&model, &bad, None, None)?);
    Ok(())
}
