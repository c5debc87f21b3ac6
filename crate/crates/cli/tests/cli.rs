use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value as Json;
use tempfile::TempDir;

struct Run {
    code: i32,
    records: Vec<Json>,
}

fn gac(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_gac")).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).expect("utf-8");
    Run {
        code: out.status.code().expect("exit code"),
        records: stdout
            .lines()
            .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{e}: {l}")))
            .collect(),
    }
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const DISJOINT: &str = r#"{"constraint":{"kind":"Disjoint","scope":["X1","X2","Y1","Y2","Y3"],"split":2},
"variables":[{"id":"X1","domain":[1,2]},{"id":"X2","domain":[1,3]},{"id":"Y1","domain":[1,2]},
{"id":"Y2","domain":[1,3]},{"id":"Y3","domain":[2,3]}]}"#;

const F1: &str = "c F1\np cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n";
const F2: &str = "p cnf 3 8\n1 2 3 0\n1 2 -3 0\n1 -2 3 0\n1 -2 -3 0\n-1 2 3 0\n-1 2 -3 0\n-1 -2 3 0\n-1 -2 -3 0\n";
const K4: &str = "p edge 4 6\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n";

#[test]
fn disjoint_example_is_not_gac() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "disjoint.json", DISJOINT);
    let r = gac(&["question", "--q", "is-it-gac", s(&inst)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.records[0]["answer"], false);
    assert_eq!(r.records[0]["engine"], "generic");

    let r = gac(&["question", "--q", "gac-domain", s(&inst)]);
    let d = &r.records[0]["witness"]["domains"];
    assert_eq!(d["X2"], serde_json::json!([1]));
    assert_eq!(d["Y1"], serde_json::json!([2]));
}

#[test]
fn singleton_support() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "singleton.json",
        r#"{"constraint":{"kind":"AllDifferent","scope":["X","Y"]},
        "variables":[{"id":"X","domain":[1]},{"id":"Y","domain":[1,2]}]}"#,
    );
    let yes = gac(&["question", "--q", "gac-support", "--var", "Y", "--value", "2", s(&inst)]);
    assert_eq!(yes.records[0]["answer"], true);
    assert_eq!(yes.records[0]["witness"]["support"]["X"], 1);
    let no = gac(&["question", "--q", "gac-support", "--var", "Y", "--value", "1", s(&inst)]);
    assert_eq!((no.code, &no.records[0]["answer"]), (0, &Json::Bool(false)));
    let missing = gac(&["question", "--q", "gac-support", "--var", "Y", s(&inst)]);
    assert_eq!(missing.code, 2);
}

#[test]
fn reducer_engine_matches_generic_on_gadget() {
    let dir = TempDir::new().unwrap();
    let src = write(&dir, "f1.cnf", F1);
    let out = dir.path().join("nvalue-f1.json");
    assert_eq!(gac(&["gadget", "--family", "nvalue", "--out", s(&out), s(&src)]).code, 0);
    let meta: Json = serde_json::from_str(&std::fs::read_to_string(dir.path().join("nvalue-f1.json.meta.json")).unwrap())
        .unwrap();
    assert_eq!(meta["question"]["question"], "no-gac-wipeout");
    assert_eq!(meta["sourceAnswerMeaning"], "satisfiable");

    let generic = gac(&["question", "--q", "no-gac-wipeout", s(&out)]);
    let reduced = gac(&["question", "--q", "no-gac-wipeout", "--engine", "via-support", s(&out)]);
    assert_eq!(reduced.code, 0);
    assert_eq!(reduced.records[0]["engine"], "no-gac-wipeout-via-support");
    assert_eq!(generic.records[0]["answer"], reduced.records[0]["answer"]);
    assert_eq!(generic.records[0]["answer"], true);
}

#[test]
fn maxgac_with_candidate_file() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "disjoint.json", DISJOINT);
    let cand = write(&dir, "cand.json", r#"{"X1":[1],"X2":[1],"Y1":[2],"Y2":[3],"Y3":[2,3]}"#);
    let r = gac(&["question", "--q", "max-gac", "--candidate", s(&cand), s(&inst)]);
    assert_eq!(r.records[0]["answer"], true);
    let r = gac(&["question", "--q", "max-gac", "--engine", "superset-sweep", "--candidate", s(&cand), s(&inst)]);
    assert_eq!(r.records[0]["answer"], true);
}

#[test]
fn propagators_and_their_preconditions() {
    let dir = TempDir::new().unwrap();
    let pigeon = write(
        &dir,
        "pigeon.json",
        r#"{"constraint":{"kind":"AllDifferent","scope":["A","B","C"]},
        "variables":[{"id":"A","domain":[1,2]},{"id":"B","domain":[1,2]},{"id":"C","domain":[1,2]}]}"#,
    );
    let r = gac(&["propagate", "--propagator", "alldifferent", s(&pigeon)]);
    assert_eq!((r.code, &r.records[0]["answer"]), (0, &Json::Bool(false)));

    let chain = write(
        &dir,
        "chain.json",
        r#"{"constraint":{"kind":"Cardpath","scope":["N","X1","X2","X3"],
        "template":{"kind":"Table","scope":["a","b"],"tuples":[[0,1],[1,0]]}},
        "variables":[{"id":"N","domain":[0,1,2]},{"id":"X1","domain":[0]},{"id":"X2","domain":[0]},{"id":"X3","domain":[0]}]}"#,
    );
    let r = gac(&["propagate", "--propagator", "cardpath-dp", s(&chain)]);
    assert_eq!(r.records[0]["witness"]["domains"]["N"], serde_json::json!([0]));

    let repeat = write(
        &dir,
        "repeat.json",
        r#"{"constraint":{"kind":"Gcc","scope":["X","X"],"occ":{}},"variables":[{"id":"X","domain":[1,2]}]}"#,
    );
    let r = gac(&["propagate", "--propagator", "gcc", s(&repeat)]);
    assert_eq!(r.code, 4);
    assert_eq!(r.records[0]["error"]["kind"], "unsupported");
}

#[test]
fn gadget_verification_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let f1 = write(&dir, "f1.cnf", F1);
    let f2 = write(&dir, "f2.cnf", F2);
    let k4 = write(&dir, "k4.graph", K4);

    let r = gac(&["gadget", "--family", "nvalue", "--verify", s(&f1)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.records[0]["witness"]["agree"], true);
    assert_eq!(r.records[0]["witness"]["certificateValid"], true);

    let r = gac(&["gadget", "--family", "cardpath-3col", "--verify", s(&k4)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.records[0]["answer"], false);
    assert_eq!(r.records[0]["witness"]["oracleAnswer"], false);

    let r = gac(&["gadget", "--family", "card", s(&f2)]);
    assert_eq!(r.code, 2);
    assert_eq!(r.records[0]["error"]["kind"], "precondition");

    assert_eq!(gac(&["gadget", "--family", "no-such", s(&f1)]).code, 2);
    let bad = write(&dir, "bad.cnf", "p cnf 3 1\n1 x 3 0\n");
    let r = gac(&["gadget", "--family", "nvalue", s(&bad)]);
    assert_eq!((r.code, &r.records[0]["error"]["kind"]), (2, &Json::from("parse")));
}

#[test]
fn budget_exhaustion_exits_3() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "disjoint.json", DISJOINT);
    let r = gac(&["--budget", "2", "question", "--q", "gac-domain", s(&inst)]);
    assert_eq!(r.code, 3);
    assert_eq!(r.records[0]["error"]["kind"], "budget-exhausted");
}

#[test]
fn malformed_instance_exits_2() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "broken.json", "{\"constraint\": [");
    let r = gac(&["question", "--q", "is-it-gac", s(&inst)]);
    assert_eq!((r.code, &r.records[0]["error"]["kind"]), (2, &Json::from("parse")));
}

fn without_timing(mut records: Vec<Json>) -> Vec<Json> {
    for r in &mut records {
        if let Some(o) = r.as_object_mut() {
            o.remove("elapsedMs");
        }
    }
    records
}

#[test]
fn suites_pass_and_are_deterministic() {
    let args = ["--seed", "7", "suite", "reducers", "--scale", "small"];
    let a = gac(&args);
    assert_eq!(a.code, 0);
    let summary = a.records.last().unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["tallies"]["agree"], summary["cases"]);
    assert_eq!(without_timing(a.records), without_timing(gac(&args).records));

    for name in ["paper-examples", "smoke", "propagators"] {
        let r = gac(&["suite", name, "--scale", "small"]);
        assert_eq!(r.code, 0, "{name}");
    }
    let r = gac(&["suite", "gadgets", "--family", "nvalue", "--scale", "small"]);
    assert_eq!(r.code, 0);
    assert_eq!(gac(&["suite", "nonsense"]).code, 2);
}

#[test]
fn failing_gadget_suite_names_cases_and_exits_1() {
    let r = gac(&["suite", "gadgets", "--family", "scalarproduct", "--gadget-sources", "5"]);
    assert_eq!(r.code, 1);
    let summary = r.records.last().unwrap();
    assert!(!summary["failures"].as_array().unwrap().is_empty());
    let failing = r.records.iter().find(|c| c["status"] == "disagree").expect("a failing case");
    assert_eq!(failing["compared"], serde_json::json!(["scalarproduct-gadget", "oracle"]));
}
