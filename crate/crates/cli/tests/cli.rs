use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn qualred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qualred"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("QUALRED_COLOR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn schema() -> jsonschema::Validator {
    let text =
        std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json"))
            .unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

/// Parses stdout as JSON and validates it against the shipped schema.
fn report(o: &Output) -> Value {
    let v: Value =
        serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)));
    let errors: Vec<String> = schema().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{v:#}");
    v
}

#[test]
fn reduce_fx1() {
    let o = qualred(&["reduce", "fx1.qg", "--op", "double"]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    assert_eq!(v["limit"], json!({"1": "{1}", "2": "{1}"}));
    assert_eq!(v["status"], "CONVERGED");
}

#[test]
fn reduce_with_path() {
    let o = qualred(&[
        "reduce",
        "fx5-derived.qg",
        "--op",
        "double",
        "--path",
        "restrict-to-1-and-half.path",
    ]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    assert_eq!(v["limit"], json!({"1": "{1/2} u {1}", "2": "{1/2} u {1}"}));
    assert_eq!(v["stages"].as_array().unwrap().len(), 2);
    assert_eq!(v["valid_path"], true);
}

#[test]
fn reduce_exit_codes() {
    assert_eq!(code(&qualred(&["reduce", "missing.qg"])), 1);
    let dir = std::env::temp_dir().join(format!("qualred-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.qg");
    std::fs::write(&bad, "game \"x\"\nspace 1 = interval [0,1\n").unwrap();
    assert_eq!(code(&qualred(&["reduce", bad.to_str().unwrap()])), 1);
    // removing the surviving dominator is an invalid path
    let path = dir.join("bad.path");
    std::fs::write(&path, "step: player=1 remove={a}\n").unwrap();
    assert_eq!(
        code(&qualred(&["reduce", "fxf1.qg", "--path", path.to_str().unwrap()])),
        2
    );
    std::fs::write(&path, "step: nonsense\n").unwrap();
    assert_eq!(
        code(&qualred(&["reduce", "fxf1.qg", "--path", path.to_str().unwrap()])),
        2
    );
    // unknown operator
    assert_eq!(code(&qualred(&["reduce", "fx1.qg", "--op", "sideways"])), 1);
    assert_eq!(code(&qualred(&["reduce", "fx1.qg", "--max-iters", "0"])), 1);
}

#[test]
fn capped_and_vacuous() {
    let o = qualred(&["reduce", "fxf1.qg", "--op", "double", "--max-iters", "1"]);
    assert_eq!(code(&o), 0);
    let dir = std::env::temp_dir().join(format!("qualred-cap-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    // a chain a1 < a2 < a3 for player 1 against b1 < b2 for player 2
    let chain = dir.join("chain.qg");
    std::fs::write(
        &chain,
        "game \"chain\"\nspace 1 = finite {a1, a2, a3}\nspace 2 = finite {b1, b2}\nutil 1 table:\n  at (a1, b1) = 0\n  at (a1, b2) = 0\n  at (a2, b1) = 1\n  at (a2, b2) = -1\n  at (a3, b1) = 2\n  at (a3, b2) = 2\nutil 2 table:\n  at (a1, b1) = 0\n  at (a1, b2) = 1\n  at (a2, b1) = 0\n  at (a2, b2) = 1\n  at (a3, b1) = 1\n  at (a3, b2) = 0\n",
    )
    .unwrap();
    let o = qualred(&["reduce", chain.to_str().unwrap(), "--op", "double", "--max-iters", "1"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["status"], "CAPPED");
    let o = qualred(&["reduce", chain.to_str().unwrap(), "--op", "double"]);
    assert_eq!(code(&o), 0);
    // each of player 1's strategies dominates the other, so TAIL removes both
    let cycle = dir.join("cycle.qg");
    std::fs::write(
        &cycle,
        "game \"cycle\"\nspace 1 = finite {a, b}\nspace 2 = finite {c}\npref 1 table:\n  at (a, c) : {b}\n  at (b, c) : {a}\npref 2 table:\n  at (a, c) : {}\n  at (b, c) : {}\n",
    )
    .unwrap();
    let o = qualred(&["reduce", cycle.to_str().unwrap(), "--op", "tail"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["status"], "VACUOUS");
}

#[test]
fn check_examples() {
    let o = qualred(&[
        "check",
        "fx4.qg",
        "--hypotheses",
        "propertyT-pair,q-reflexive,q-closed-convex",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["holds"], true);
    let o = qualred(&["check", "fx1.qg", "--hypotheses", "strong-irreflexive"]);
    assert_eq!(code(&o), 5);
    let v = report(&o);
    assert_eq!(v["hypotheses"]["strong-irreflexive"]["verdict"], "fails");
    assert_eq!(v["hypotheses"]["strong-irreflexive"]["witness"]["player"], 1);
    let o = qualred(&["check", "fxf1.qg", "--conditions", "C,D", "--op", "double"]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    for st in v["conditions"]["stages"].as_array().unwrap() {
        assert_eq!(st["C"]["verdict"], "holds");
        assert_eq!(st["D"]["verdict"], "holds");
    }
    // at the full square 0 is dominated only by strategies that are dominated themselves
    let o = qualred(&["check", "fx5-derived.qg", "--conditions", "C", "--op", "double"]);
    assert_eq!(code(&o), 5);
    assert_eq!(report(&o)["conditions"]["stages"][0]["C"]["verdict"], "fails");
    assert_eq!(code(&qualred(&["check", "fx1.qg", "--hypotheses", "nonsense"])), 1);
}

#[test]
fn maximal_examples() {
    let o = qualred(&["maximal", "fx1.qg"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o), json!([["1", "1"]]));
    let o = qualred(&["maximal", "fxf1.qg", "--format", "csv"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "player1,player2\na,c\n");
    let o = qualred(&["maximal", "fx4.qg", "--format", "text"]);
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "x1 in (1,2] and x2 in (1,2]\nx1 in [0,1] and x2 in [0,1]\n"
    );
}

#[test]
fn preserve_singleton_path() {
    let o = qualred(&["preserve", "fx1.qg", "--op", "double", "--path", "singletons.path"]);
    assert_eq!(code(&o), 6);
    let v = report(&o);
    assert_eq!(v["verdict"], "NOT-EQUAL");
    assert_eq!(v["label"], "EXPECTED-COUNTEREXAMPLE");
    assert_eq!(v["only_original"], json!(["(1, 1)"]));
    let o = qualred(&["preserve", "fx1.qg", "--op", "double"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["verdict"], "EQUAL");
}

#[test]
fn oracle_examples() {
    let o = qualred(&["oracle", "fxf1.qg"]);
    assert_eq!(code(&o), 0);
    let v = report(&o);
    assert_eq!(v["maximal_reductions"], json!([{"1": "{a}", "2": "{c}"}]));
    let o = qualred(&["oracle", "fx5-derived.qg", "--grid", "1/2", "--op", "double"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["count"], 1);
    assert_eq!(code(&qualred(&["oracle", "fx5-derived.qg", "--grid", "1/10"])), 7);
    assert_eq!(code(&qualred(&["oracle", "fx5-derived.qg"])), 1);
}

#[test]
fn fuzz_csv_and_json() {
    let o = qualred(&[
        "fuzz",
        "--players",
        "2",
        "--sizes",
        "3,3",
        "--trials",
        "500",
        "--seed",
        "42",
        "--check",
        "lemma1,lemma2,theorem3,theorem10",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 501);
    let o = qualred(&[
        "fuzz",
        "--sizes",
        "2,2",
        "--trials",
        "20",
        "--seed",
        "1",
        "--mode",
        "raw-preference",
        "--format",
        "json",
    ]);
    let v = report(&o);
    assert_eq!(v["trials"], 20);
    assert_eq!(code(&qualred(&["fuzz", "--players", "3", "--sizes", "3,3"])), 1);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["reduce", "fx5-derived.qg", "--op", "tail"],
        vec!["check", "fx4.qg"],
        vec!["maximal", "fx4.qg"],
        vec!["fuzz", "--trials", "50", "--seed", "3", "--format", "json"],
    ] {
        assert_eq!(qualred(&args).stdout, qualred(&args).stdout, "{args:?}");
    }
}

#[test]
fn out_flag_and_formats() {
    let dir = std::env::temp_dir().join(format!("qualred-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("trace.csv");
    let o = qualred(&["reduce", "fxf1.qg", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("stage,player,set,eliminated\n0,1,\"{a, b}\",{b}\n"));
    let o = qualred(&["reduce", "fx1.qg", "--format", "text"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("fx1 under double: CONVERGED\n"));
    assert!(!text.contains('\x1b'));
    let colored = Command::new(env!("CARGO_BIN_EXE_qualred"))
        .args(["reduce", "fx1.qg", "--format", "text"])
        .current_dir(fixtures())
        .env("QUALRED_COLOR", "always")
        .output()
        .unwrap();
    assert!(String::from_utf8(colored.stdout).unwrap().contains("\x1b[32mCONVERGED"));
}
