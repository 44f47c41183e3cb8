use std::path::PathBuf;

use streett::cli::run;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn streett(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("streett").chain(args.iter().copied()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

#[test]
fn solve_prints_exact_probabilities() {
    for (file, expected) in [
        ("fig2.json", "1"),
        ("fig3.json", "2/3"),
        ("fig5.json", "2/3"),
        ("empty-streett.json", "1"),
        ("fig3-track-ab.json", "2/3"),
        ("truncated-casino-debt.json", "1215/2123"),
    ] {
        let o = streett(&["solve", &fixture(file)]);
        assert_eq!(o.code, 0, "{file}: {}", o.stderr);
        assert_eq!(o.stdout.trim(), expected, "{file}");
    }
    let o = streett(&["solve", &fixture("fig3.json"), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["probability"], "2/3");
}

#[test]
fn solve_refuses_infinite_chains() {
    let o = streett(&["solve", &fixture("casino.json")]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with("error:"));
}

#[test]
fn failing_check_exits_one_and_names_the_state() {
    let o = streett(&["check", &fixture("fig3.json"), &fixture("decomposition-bad.json")]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("Fail"));
    assert!(o.stdout.contains("Thm3.5/Eq.18"));
    assert!(o.stdout.contains("s5"));
}

#[test]
fn passing_checks_exit_zero() {
    for (model, cert, verdict) in [
        ("fig5.json", "fig5-decomposition.json", "pass"),
        ("fig2.json", "fig2-decomposition.json", "pass"),
        ("fig5.json", "fig5-qual-safety.json", "pass"),
        ("fig3.json", "fig3-quant-safety.json", "pass"),
        ("casino.json", "casino-rule1.json", "pass-on-window"),
        ("casino.json", "casino-rule2.json", "pass-on-window"),
        ("casino.json", "casino-qual-safety.json", "pass-on-window"),
    ] {
        let o = streett(&["check", &fixture(model), &fixture(cert), "--json"]);
        assert_eq!(o.code, 0, "{cert}: {}{}", o.stdout, o.stderr);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["verdict"], verdict, "{cert}");
    }
}

#[test]
fn window_and_grid_overrides_apply() {
    let o = streett(&[
        "check",
        &fixture("casino.json"),
        &fixture("casino-rule1.json"),
        "--window",
        "-5..5",
        "--r-grid",
        "0,1,2",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("rule1: PassOnWindow (window [-5, 5])"));
    assert!(o.stdout.contains("Rule1/Eq.68              pair 1 Pass (6 checked)"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(streett(&[]).code, 2);
    assert_eq!(streett(&["frobnicate"]).code, 2);
    assert_eq!(streett(&["check", &fixture("fig3.json")]).code, 2);
    let o = streett(&["check", &fixture("casino.json"), &fixture("casino-rule1.json"), "--window", "5..-5"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("empty window"));
    let o = streett(&["solve", "/nonexistent/model.json"]);
    assert_eq!(o.code, 2);
    assert_eq!(streett(&["--help"]).code, 0);
}

#[test]
fn synthesize_then_check_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    // The second model is checked on its product with the automaton.
    for model in ["fig5.json", "fig5-track-ab.json"] {
        for rule in ["decomposition", "rule1", "rule2"] {
            let cert = dir.path().join(format!("{model}-{rule}"));
            let cert = cert.to_str().unwrap();
            let o = streett(&["synthesize", &fixture(model), "--rule", rule, "--k", "1", "--out", cert]);
            assert_eq!(o.code, 0, "{model} {rule}: {}", o.stderr);
            let o = streett(&["check", &fixture(model), cert, "--json"]);
            assert_eq!(o.code, 0, "{model} {rule}: {}{}", o.stdout, o.stderr);
            let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
            assert_eq!(v["bound"], "2/3", "{model} {rule}");
        }
    }
}

#[test]
fn synthesize_warns_below_one() {
    let o = streett(&["synthesize", &fixture("fig3.json")]);
    assert_eq!(o.code, 0);
    assert!(o.stderr.contains("warning"));
    assert!(o.stdout.contains("\"rule\""));
}

#[test]
fn product_writes_an_explicit_model_with_the_same_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("product.json");
    let out = out.to_str().unwrap();
    let o = streett(&["product", &fixture("fig5-track-ab.json"), out]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(streett(&["solve", out]).stdout, streett(&["solve", &fixture("fig5-track-ab.json")]).stdout);
    assert_eq!(streett(&["product", &fixture("fig3.json"), out]).code, 2);
}

#[test]
fn simulate_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let o = streett(&[
            "simulate",
            "lending-casino",
            "--param",
            "eps=1/10",
            "--steps",
            "1000",
            "--trajectories",
            "3",
            "--seed",
            "42",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert!(o.stdout.starts_with("seed 42"));
    }
    let a = std::fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read_to_string(&paths[1]).unwrap());
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("trajectory,n,state,statistic"));
    // Points at n = 0, 100, ..., 1000 for each of three runs.
    assert_eq!(lines.count(), 3 * 11);
}

#[test]
fn bound_brackets_the_casino_return_probability() {
    let o = streett(&[
        "bound",
        "lending-casino",
        "--param",
        "eps=1/20",
        "--target",
        "Solvency",
        "--window",
        "-14..14",
        "--from",
        "-1",
        "--majorant",
        "casino-v1",
        "--json",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["upper"], "19/21");
    let o = streett(&["bound", "lending-casino", "--target", "Solvency", "--window", "-3..3"]);
    assert_eq!(o.code, 2, "eps is required");
    let o = streett(&["bound", "lending-casino", "--param", "eps=1/5", "--target", "Solvency"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("--window"));
}
