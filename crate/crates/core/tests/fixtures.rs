use std::path::PathBuf;

use streett::approx::{visit_frequency, REFERENCE_SEED};
use streett::certificate::{Verdict, Witness};
use streett::chain::{Region, StateId};
use streett::model::{check_certificate, load_certificate, load_model};
use streett::oracle::streett_probability;
use streett::scalar::{int, rat, Rational, Scalar};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

#[test]
fn oracle_values() {
    let cases = [
        ("fig2.json", int(1)),
        ("fig3.json", rat(2, 3)),
        ("fig5.json", rat(2, 3)),
        ("empty-streett.json", int(1)),
        ("fig3-track-ab.json", rat(2, 3)),
        ("fig5-track-ab.json", rat(2, 3)),
        // Gambler's ruin on [-6, 6] from 1, solved independently.
        ("truncated-casino-debt.json", rat(1215, 2123)),
    ];
    for (file, expected) in cases {
        let model = load_model(fixture(file)).unwrap();
        let (chain, cond) = model.target().unwrap();
        assert_eq!(streett_probability(&chain, &cond).unwrap(), expected, "{file}");
    }
}

#[test]
fn certificate_verdicts() {
    let cases: [(&str, &str, Verdict, Option<Rational>); 8] = [
        ("fig5.json", "fig5-decomposition.json", Verdict::Pass, Some(rat(2, 3))),
        ("fig2.json", "fig2-decomposition.json", Verdict::Pass, Some(int(1))),
        ("fig3.json", "decomposition-bad.json", Verdict::Fail, None),
        ("fig5.json", "fig5-qual-safety.json", Verdict::Pass, None),
        ("fig3.json", "fig3-quant-safety.json", Verdict::Pass, Some(rat(2, 3))),
        ("casino.json", "casino-rule1.json", Verdict::PassOnWindow, Some(int(1))),
        ("casino.json", "casino-rule2.json", Verdict::PassOnWindow, Some(int(1))),
        ("casino.json", "casino-qual-safety.json", Verdict::PassOnWindow, None),
    ];
    for (model, cert, verdict, bound) in cases {
        let report =
            check_certificate(&load_model(fixture(model)).unwrap(), &load_certificate(fixture(cert)).unwrap(), None, None)
                .unwrap();
        assert_eq!(report.verdict, verdict, "{cert}\n{report}");
        assert_eq!(report.bound, bound.map(Scalar::Exact), "{cert}");
    }
}

#[test]
fn bad_decomposition_fails_worst_at_s5() {
    let model = load_model(fixture("fig3.json")).unwrap();
    let report = check_certificate(&model, &load_certificate(fixture("decomposition-bad.json")).unwrap(), None, None).unwrap();
    let failures: Vec<_> = report.failures().collect();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].tag, "Thm3.5/Eq.18");
    assert_eq!(failures[0].violations, 2);
    let at: Vec<String> = failures[0].witnesses.iter().map(|w| format!("{:?}", w.at)).collect();
    let state = |s: &str| format!("{:?}", Witness::State { state: StateId::name(s) });
    assert_eq!(at, [state("s5"), state("s0")]);
}

/// Long-run share of time in s2 on fig3 is 1/3 · 1/2 = 1/6.
#[test]
fn fig3_visit_frequency_band() {
    let model = load_model(fixture("fig3.json")).unwrap();
    let s2 = Region::from_states("s2", [StateId::name("s2")]);
    let freqs = visit_frequency(&model.chain, &s2, 10_000, 1_000, REFERENCE_SEED).unwrap();
    let mean = freqs.iter().sum::<f64>() / freqs.len() as f64;
    assert!((mean - 1.0 / 6.0).abs() < 0.03, "mean {mean}");
}
