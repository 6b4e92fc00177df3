//! The verification suite: one PASS/FAIL line per criterion. Sub-checks
//! that fail against printed data must be exactly the recorded deviations.
//! Runs without the test harness so the criterion lines always print.

use std::collections::BTreeSet;
use std::process::Command;

use mazur_floer::acceptance::{render, run_all, Criterion, KNOWN_DEVIATIONS};
use mazur_floer::cfk::PRESETS;

fn binary(args: &[&str], threads: &str) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_mazur-floer"))
        .args(args)
        .env("MAZUR_FLOER_THREADS", threads)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// The binary's `verify` and `invariants` output for 1, 4 and 4 threads.
fn binary_deterministic() -> Vec<String> {
    let mut all = vec!["invariants"];
    all.extend(PRESETS);
    let mut json = all.clone();
    json.push("--json");
    let mut problems = Vec::new();
    for args in [vec!["verify"], all, json] {
        let runs: Vec<_> = ["1", "4", "4"].iter().map(|t| binary(&args, t)).collect();
        if runs.iter().any(|r| r != &runs[0]) {
            problems.push(format!("`{}` differs across runs", args.join(" ")));
        }
    }
    problems
}

fn find<'a>(criteria: &'a [Criterion], name: &str) -> &'a [String] {
    criteria
        .iter()
        .flat_map(|c| &c.checks)
        .find(|s| s.name == name)
        .map(|s| s.detail.as_slice())
        .expect("sub-check exists")
}

fn main() {
    let criteria = run_all();
    let binary_problems = binary_deterministic();
    for c in &criteria {
        let pass = c.pass() && (c.id != 9 || binary_problems.is_empty());
        println!("criterion {}: {}  {}", c.id, if pass { "PASS" } else { "FAIL" }, c.title);
    }
    // The rendered report opens with the same summary lines; print only the detail.
    let report = render(&criteria);
    for line in report.lines().skip(criteria.len()) {
        println!("{line}");
    }
    for p in &binary_problems {
        println!("binary: {p}");
    }

    assert!(binary_problems.is_empty(), "{binary_problems:?}");
    let failing: BTreeSet<&str> = criteria.iter().flat_map(Criterion::failures).map(|s| s.name.as_str()).collect();
    let known: BTreeSet<&str> = KNOWN_DEVIATIONS.iter().map(|(n, _)| *n).collect();
    assert_eq!(failing, known, "failing sub-checks must be exactly the recorded deviations");
    for c in &criteria {
        if ![3, 4, 6].contains(&c.id) {
            assert!(c.pass(), "criterion {} fails", c.id);
        }
    }

    // Each deviation fails in exactly the analysed way.
    let q21 = find(&criteria, KNOWN_DEVIATIONS[0].0);
    assert_eq!(
        q21[..4],
        [
            "3 operations only in the derived table:",
            "  m(x3, [r23 r2 r1]) = U^1 q1",
            "  m(y3, [r2 r12 r1]) = q5",
            "  m(y4, [r12 r12 r1]) = q5",
        ]
    );
    assert!(q21.last().unwrap().starts_with("A-infinity relations: derived hold, printed fail"));
    let q2m1 = find(&criteria, KNOWN_DEVIATIONS[1].0);
    assert!(q2m1[0].starts_with("component sizes [39, "), "{q2m1:?}");
    let rung = find(
        &criteria,
        "reduced (2,-1) tensor product has a component isomorphic to the Q2-1 table with the r10/s10 rung",
    );
    assert_eq!(rung[1], "39-generator component matches after a change of basis");
    for (name, _) in &KNOWN_DEVIATIONS[2..] {
        assert_eq!(find(&criteria, name), ["chain -1, expected 1"]);
    }
    println!("\nacceptance: every failing sub-check is a recorded deviation with the analysed outcome");
}
