//! End-to-end runs of the `orthorep` binary.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const WORKED_FORMULA: &str = "p cnf 3 5\n1 2 3 0\n-1 2 0\n1 -3 0\n-2 3 0\n-1 -2 -3 0\n";
const P4: &str = "4 3\n1 2\n2 3\n3 4\n";
const CO_P4: &str = "4 3\n1 3\n1 4\n2 4\n";
const PETERSEN: &str = "IheA@GUAo\n";

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_orthorep"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Run expecting `want` as exit code and parse the JSON report.
fn report(args: &[&str], stdin: &str, want: i32) -> Value {
    let out = run(args, stdin);
    assert_eq!(code(&out), want, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn text(args: &[&str], stdin: &str) -> String {
    let mut a = args.to_vec();
    a.extend(["--format", "text"]);
    String::from_utf8(run(&a, stdin).stdout).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn greedegree_values() {
    assert_eq!(report(&["greedegree", "-"], P4, 0)["greedegree"], 1);
    assert_eq!(report(&["greedegree", "-"], "5 5\n1 2\n2 3\n3 4\n4 5\n5 1\n", 0)["greedegree"], 2);
    let r = report(&["greedegree", "-"], PETERSEN, 0);
    assert_eq!(r["greedegree"], 3);
    assert_eq!(r["witness"].as_array().unwrap().len(), 10);
}

#[test]
fn reports_carry_schema_and_config() {
    let r = report(&["represent", "-", "--seed", "5", "--bound", "100"], P4, 0);
    assert_eq!(r["schema"], "orthorep/1");
    assert_eq!(r["config"]["subcommand"], "represent");
    assert_eq!(r["config"]["seed"], 5);
    assert_eq!(r["config"]["bound"], 100);
    assert_eq!(r["config"]["inputs"][0], "-");
}

#[test]
fn trees_have_codimension_one() {
    for tree in [P4, "5 4\n1 2\n1 3\n1 4\n1 5\n", "6 5\n1 2\n2 3\n2 4\n4 5\n4 6\n"] {
        let r = report(&["represent", "-", "--seed", "2"], tree, 0);
        assert_eq!(r["success"]["codimension"], 1);
        assert_eq!(r["nullity"], 1);
        assert_eq!(r["pass"], true);
        assert_eq!(r["psd"], true);
        assert_eq!(r["upper_zero"]["generic"], true);
        assert_eq!(r["sap"]["has_sap"], true);
    }
}

#[test]
fn complete_graph_codimension() {
    let r = report(&["represent", "-", "--seed", "9"], "5 10\n1 2\n1 3\n1 4\n1 5\n2 3\n2 4\n2 5\n3 4\n3 5\n4 5\n", 0);
    assert_eq!(r["d"], 1);
    assert_eq!(r["success"]["codimension"], 4);
}

#[test]
fn complement_of_path_is_faithful_psd() {
    let r = report(&["represent", "-", "--seed", "7"], CO_P4, 0);
    assert_eq!(r["success"]["codimension"], 1);
    assert_eq!(r["pattern"]["is_faithful"], true);
    assert_eq!(r["psd"], true);
    // nonzero Gram entries reproduce the input graph
    assert_eq!(r["support_graph6"], "CU");
}

#[test]
fn output_is_deterministic() {
    let args = ["represent", "-", "--seed", "11"];
    let a = run(&args, PETERSEN);
    let b = run(&args, PETERSEN);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["represent", "-", "--seed", "12"], PETERSEN);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn low_dimension_fails_the_verdict() {
    // below n − deg(last) the run cannot be faithful
    let r = report(&["represent", "-", "--seed", "1", "--dim", "1"], P4, 2);
    assert_eq!(r["pass"], false);
    assert_eq!(r["d"], 1);
}

#[test]
fn persistent_degeneracy_exits_three() {
    let out = run(&["represent", "-", "--seed", "1", "--bound", "1"], "E]~o\n");
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("attempts"));
}

#[test]
fn strict_mode_requires_a_seed() {
    assert_eq!(code(&run(&["represent", "-", "--strict"], P4)), 1);
    assert_eq!(code(&run(&["represent", "-", "--strict", "--seed", "3"], P4)), 0);
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(code(&run(&["greedegree", "/nonexistent/graph.txt"], "")), 1);
    assert_eq!(code(&run(&["greedegree", "-"], "3 1\n1 1\n")), 1);
    assert_eq!(code(&run(&["garden", "-", "--i", "1", "--j", "9"], P4)), 1);
    assert_eq!(code(&run(&["garden", "-", "--order", "1,2,2,3", "--i", "1", "--j", "2"], P4)), 1);
}

#[test]
fn cancelling_garden_is_identically_zero() {
    let out = text(&["garden", "-", "--order", "1,2,3,4", "--i", "1", "--j", "4", "--dim", "2"], CO_P4);
    assert!(out.contains("leading: identically zero"), "{out}");
    let r = report(&["garden", "-", "--order", "1,2,3,4", "--i", "1", "--j", "4", "--dim", "2"], CO_P4, 0);
    assert_eq!(r["identically_zero"], true);
    assert_eq!(r["report"]["greedy"], false);
    assert_eq!(r["expansion"]["terms"], 0);
}

#[test]
fn greedy_adjacent_pair_has_unit_leading_term() {
    // positions 1 and 2 of the greedy order hold adjacent vertices 1 and 3
    let r = report(&["garden", "-", "--order", "1,3,4,2", "--i", "1", "--j", "2", "--dim", "2"], CO_P4, 0);
    let coeff = r["report"]["leading"]["coeff"].as_i64().unwrap();
    assert_eq!(coeff.abs(), 1);
    assert_eq!(r["report"]["verified"], true);
    // all adjacent pairs at the full dimension
    for (i, j) in [("1", "2"), ("1", "3"), ("3", "4")] {
        let r = report(&["garden", "-", "--order", "1,3,4,2", "--i", i, "--j", j], CO_P4, 0);
        assert_eq!(r["report"]["related"], true, "pair ({i}, {j})");
        assert_eq!(r["report"]["verified"], true, "pair ({i}, {j})");
    }
}

#[test]
fn non_adjacent_pair_vanishes() {
    let r = report(&["garden", "-", "--order", "1,3,4,2", "--i", "1", "--j", "4"], CO_P4, 0);
    assert_eq!(r["identically_zero"], true);
    assert_eq!(r["report"]["related"], false);
}

#[test]
fn garden_budget_exits_four() {
    assert_eq!(code(&run(&["garden", "-", "--i", "1", "--j", "4", "--budget-index", "3"], CO_P4)), 4);
}

#[test]
fn reduce_worked_formula() {
    let r = report(&["reduce", "-", "--factor", "1"], WORKED_FORMULA, 0);
    let b = &r["bundle"];
    assert_eq!((b["n"].as_u64(), b["f"].as_u64()), (Some(22), Some(4)));
    assert_eq!((b["delta"].as_u64(), b["Delta"].as_u64()), (Some(11), Some(15)));
    let g6 = b["graph6"].as_str().unwrap();
    assert_eq!(text(&["reduce", "-", "--factor", "1"], WORKED_FORMULA).lines().next(), Some(g6));
}

#[test]
fn fraction_half_matches_factor_one() {
    let a = report(&["reduce", "-", "--factor", "1"], WORKED_FORMULA, 0);
    let b = report(&["reduce", "-", "--fraction", "1/2"], WORKED_FORMULA, 0);
    assert_eq!(a["bundle"], b["bundle"]);
}

#[test]
fn reduce_verify_agrees_on_small_formulas() {
    let cnfs = [
        "p cnf 1 1\n1 0\n",
        "p cnf 1 2\n1 0\n-1 0\n",
        "p cnf 2 3\n1 2 0\n-1 0\n-2 0\n",
        "p cnf 2 2\n1 -2 0\n-1 2 0\n",
        "p cnf 3 2\n1 -2 0\n2 3 0\n",
    ];
    let mut unsat = 0;
    for cnf in cnfs {
        let out = text(&["reduce", "-", "--verify"], cnf);
        assert!(out.contains("equivalence: agree"), "{cnf}: {out}");
        assert!(out.contains("dichotomy: holds"), "{cnf}: {out}");
        unsat += out.contains("satisfiable: no") as usize;
    }
    assert_eq!(unsat, 2);
}

#[test]
fn reduce_rejects_bad_input() {
    assert_eq!(code(&run(&["reduce", "-"], "p cnf 0 0\n")), 1);
    assert_eq!(code(&run(&["reduce", "-"], "p cnf 2 1\n1 -1 0\n")), 1);
    assert_eq!(code(&run(&["reduce", "-", "--fraction", "3/4"], WORKED_FORMULA)), 1);
    assert_eq!(code(&run(&["reduce", "-", "--factor", "1/2"], WORKED_FORMULA)), 1);
}

#[test]
fn check_matrix_verdicts() {
    let g = scratch("p4.txt", P4);
    let g = g.to_str().unwrap();
    // Laplacian of the path: PSD, faithful, nullity one
    let lap = "1 -1 0 0\n-1 2 -1 0\n0 -1 2 -1\n0 0 -1 1\n";
    let r = report(&["check-matrix", "-", g], lap, 0);
    assert_eq!(r["witness"]["passed"], true);
    assert_eq!(r["witness"]["nullity"], 1);
    assert_eq!(r["sap"]["has_sap"], true);
    // indefinite matrix with the same pattern
    let bad = "1 -3 0 0\n-3 2 -1 0\n0 -1 2 -1\n0 0 -1 1\n";
    let r = report(&["check-matrix", "-", g], bad, 2);
    assert_eq!(r["psd"]["verdict"], "not_psd");
    // wrong pattern
    let zeros = "1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n";
    let r = report(&["check-matrix", "-", g], zeros, 2);
    assert_eq!(r["pattern"]["is_faithful"], false);
    assert_eq!(r["pattern"]["zero_at_edges"].as_array().unwrap().len(), 3);
    // not symmetric, wrong size
    assert_eq!(code(&run(&["check-matrix", "-", g], "1 1 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n")), 1);
    assert_eq!(code(&run(&["check-matrix", "-", g], "1 0\n0 1\n")), 1);
}
