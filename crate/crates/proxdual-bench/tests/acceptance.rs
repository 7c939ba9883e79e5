//! Acceptance suite as an integration test: every criterion runs at its
//! stated tolerance and prints one pass/fail line. Run with
//! `cargo test -p proxdual-bench --test acceptance -- --nocapture`.

use proxdual_bench::acceptance::run_all;

#[test]
fn all_acceptance_criteria_pass() {
    let results = run_all();
    assert_eq!(results.len(), 8);
    let failures: Vec<String> =
        results.iter().filter(|r| !r.pass).map(|r| r.line()).collect();
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
