//! Loads a JSON model, solves it, synthesizes a rule-1 certificate, writes it
//! back out as a document and re-checks it.

use streett::model::{check_certificate, load_model, parse_model, CertificateDocument, ModelError};
use streett::oracle::streett_probability;
use streett::synthesis::{default_threshold, synthesize_decomposition, synthesize_invariant, synthesize_rule1};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/fig5-track-ab.json");
    let model = load_model(path)?;
    let (chain, cond) = model.target()?;
    println!("{path}: P = {}", streett_probability(&chain, &cond)?);

    let invariant = synthesize_invariant(&chain, &cond, 1)?;
    let witness = synthesize_decomposition(&chain, &cond, invariant, &default_threshold())?;
    let document = CertificateDocument::rule1(&chain, &synthesize_rule1(&chain, &cond, &witness)?)?;
    let text = document.to_json();
    println!("{} bytes of certificate", text.len());

    let reread = CertificateDocument::from_json(&text)?;
    print!("{}", check_certificate(&model, &reread, None, None)?);

    let broken = r#"{"format_version": 1, "chain": {"states": ["s0"], "initial": {"s0": "1"}, "transitions": {"s0": {"s0": "9/10"}}}}"#;
    match parse_model(broken) {
        Err(ModelError::Validation { path, message }) => println!("rejected at {path}: {message}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
