//! The command-line interface, run as a separate process.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mazur-floer")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn row<'a>(text: &'a str, knot: &str) -> Vec<&'a str> {
    text.lines().find(|l| l.starts_with(knot)).unwrap().split_whitespace().collect()
}

#[test]
fn invariants_of_the_right_handed_trefoil() {
    let o = run(&["invariants", "trefoil_rh"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(row(&stdout(&o), "trefoil_rh"), ["trefoil_rh", "1", "1", "2", "1", "4", "3", "ok"]);
}

#[test]
fn invariants_of_the_unknot_are_zero() {
    let o = run(&["invariants", "unknot"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(row(&stdout(&o), "unknot"), ["unknot", "0", "0", "0", "0", "0", "0", "ok"]);
}

#[test]
fn several_knots_keep_input_order() {
    let o = run(&["invariants", "t2_7", "unknot", "trefoil_lh"]);
    let knots: Vec<String> =
        stdout(&o).lines().skip(2).map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    assert_eq!(knots, ["t2_7", "unknot", "trefoil_lh"]);
}

#[test]
fn json_output() {
    let o = run(&["invariants", "--json", "trefoil_lh"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["knot"], "trefoil_lh");
    assert_eq!(v[0]["tau_q"], 0);
    assert_eq!(v[0]["epsilon_q"], 1);
    assert_eq!(v[0]["tau_q2m1"], -1);
    assert_eq!(v[0]["consistent"], true);
}

#[test]
fn formula_check_can_be_skipped() {
    let o = run(&["invariants", "--no-formula-check", "figure_eight"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(row(&stdout(&o), "figure_eight").last(), Some(&"skipped"));
}

fn json_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn knot_from_file() {
    let k = mazur_floer::cfk::preset("t2_7").unwrap();
    let f = json_file(&k.to_json());
    let o = run(&["invariants", &format!("@{}", f.path().display())]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().nth(2).unwrap();
    assert_eq!(line.split_whitespace().skip(1).take(6).collect::<Vec<_>>(), ["3", "1", "4", "1", "8", "7"]);
}

#[test]
fn invalid_matrix_exits_with_a_report() {
    let mut k = mazur_floer::cfk::preset("trefoil_rh").unwrap();
    k.eta_in_xi[0] = vec![0, 0, 0];
    let f = json_file(&k.to_json());
    let o = run(&["invariants", &format!("@{}", f.path().display())]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("invalid knot data"), "{err}");
}

#[test]
fn malformed_json_exits_with_a_diagnostic() {
    let f = json_file("{\"n\": 1,");
    let o = run(&["invariants", &format!("@{}", f.path().display())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("malformed knot JSON"));
}

#[test]
fn unknown_preset_and_bad_thread_count() {
    assert_eq!(run(&["invariants", "granny"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_mazur-floer"))
        .args(["invariants", "unknot"])
        .env("MAZUR_FLOER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn iterate_follows_the_closed_form() {
    let o = run(&["iterate", "trefoil_lh", "4", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let taus: Vec<i64> = v.as_array().unwrap().iter().map(|r| r["tau"].as_i64().unwrap()).collect();
    assert_eq!(taus, [-1, 0, 0, 0, 0]);
}

#[test]
fn dumps_parse_back() {
    use mazur_floer::structures::{AInftyModule, DDBimodule, TypeDStructure};
    let text = |name: &str| {
        let o = run(&["dump", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        stdout(&o)
    };
    assert_eq!(DDBimodule::parse(&text("cfdd_xlq")).unwrap().len(), 34);
    assert_eq!(TypeDStructure::parse(&text("cfd_v_q")).unwrap().len(), 13);
    assert_eq!(AInftyModule::parse(&text("cfa_v_q2m1")).unwrap().len(), 39);
    let json = run(&["dump", "cfd_v_q21", "--json"]);
    assert_eq!(TypeDStructure::from_json(&stdout(&json)).unwrap().len(), 37);
    assert_eq!(run(&["dump", "cfd_v_x"]).status.code(), Some(2));
}
