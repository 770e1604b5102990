//! End-to-end runs of the binary against the bundled data files.

use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_monoid-pcsp"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        out.status.code().expect("exit code"),
    )
}

#[test]
fn classify_intro_templates() {
    for n in 2..=9 {
        let rhs = data(&format!("introN_{n}.mon"));
        let (out, code) = run(&["classify", "--lhs", &data("intro_M.nf"), "--rhs", &rhs]);
        if n % 3 == 0 {
            assert_eq!(code, 0, "n = {n}");
            assert!(out.starts_with("TRACTABLE\n"));
            assert!(out.contains("sandwich_valid: yes\n"));
        } else {
            assert_eq!(code, 10, "n = {n}");
            assert!(out.starts_with("NP-HARD\n"));
        }
    }
}

#[test]
fn classify_golden_tsv() {
    let (out, code) = run(&[
        "--format",
        "tsv",
        "classify",
        "--lhs",
        &data("intro_M.nf"),
        "--rhs",
        &data("introN_3.mon"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "status\tTRACTABLE\ncandidates\t2\nwitness\tidempotents 0 ; generators 1\n\
         sandwich_elements\t3\nsandwich_tuples\t9\nsandwich_embedding\t0 1 2\nsandwich_valid\tyes\n"
    );
}

#[test]
fn promise_violation() {
    let (out, code) = run(&["classify", "--lhs", &data("intro_closed.nf"), "--rhs", &data("introN_4.mon")]);
    assert_eq!((out.as_str(), code), ("PROMISE-VIOLATION\n", 2));
}

#[test]
fn solve_and_oracle() {
    let (out, code) = run(&["solve", "--template", &data("intro_closed.nf"), "--instance", &data("intro.inst")]);
    assert_eq!((out.as_str(), code), ("UNSAT\n", 11));
    let (out, code) = run(&["solve", "--template", &data("intro_closed.nf"), "--instance", &data("intro_sat.inst")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("SAT\nx0: d:0 v:("));
    // The promise: the refuted instance is still satisfiable over Z/4.
    let (out, code) = run(&["oracle", "--template", &data("introN_4.mon"), "--instance", &data("intro.inst")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("SAT\n"));
    let (out, code) = run(&["solve", "--template", &data("z6_odd.mon"), "--instance", &data("empty.inst")]);
    assert_eq!((out.as_str(), code), ("SAT\n", 0));
}

#[test]
fn oracle_budget_exit_code() {
    let (_, code) = run(&[
        "--budget",
        "1",
        "oracle",
        "--template",
        &data("introN_9.mon"),
        "--instance",
        &data("intro.inst"),
    ]);
    assert_eq!(code, 3);
}

#[test]
fn regularize_flip_flop() {
    let dir = std::env::temp_dir().join(format!("monoid-pcsp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ff.mon");
    std::fs::write(&path, "flipflop1\n").unwrap();
    let (out, code) = run(&["regularize", "--lhs", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "source_size: 3\nsize: 2\nclass0: 0\nclass1: 1 2\nmonoid 2 0\n0 1\n1 1\n"
    );
}

#[test]
fn coset_closure_golden() {
    let (out, code) = run(&["--format", "tsv", "coset-closure", "--template", &data("z6_odd.mon")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("is_coset\tyes\nsize\t3\n"));
}

#[test]
fn polysearch_and_pmc() {
    let z2 = data("z2_one.mon");
    let (out, code) = run(&["polysearch", "--lhs", &z2, "--rhs", &z2, "--arity", "3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("FOUND\n"));
    let (_, code) = run(&["polysearch", "--lhs", &z2, "--rhs", &z2, "--arity", "4"]);
    assert_eq!(code, 2);

    let (inst, code) = run(&[
        "pmc-reduce",
        "--lhs",
        &z2,
        "--rhs",
        &z2,
        "--condition",
        &data("commutative.minor"),
        "--arity",
        "2",
    ]);
    assert_eq!(code, 0);
    let dir = std::env::temp_dir().join(format!("monoid-pcsp-pmc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.inst");
    std::fs::write(&path, &inst).unwrap();
    let (out, code) = run(&["oracle", "--template", &z2, "--instance", path.to_str().unwrap()]);
    assert_eq!((out.as_str(), code), ("UNSAT\n", 11));
}

#[test]
fn crosscheck_is_deterministic() {
    let t = data("z6_odd.mon");
    let a = ["--seed", "7", "crosscheck", "--template", &t, "--count", "40"];
    let first = run(&a);
    assert_eq!(first.1, 0);
    assert!(first.0.contains("agree: 40\n"));
    assert_eq!(first, run(&a));
}

#[test]
fn bad_input_exit_code() {
    let (_, code) = run(&["solve", "--template", &data("intro.inst"), "--instance", &data("intro.inst")]);
    assert_eq!(code, 2);
    let (_, code) = run(&["classify", "--lhs", "/nonexistent", "--rhs", &data("introN_2.mon")]);
    assert_eq!(code, 2);
}
