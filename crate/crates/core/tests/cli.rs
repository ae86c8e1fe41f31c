use std::path::{Path, PathBuf};

use homcount::cli::{run, EXIT_DIFFER, EXIT_OK, EXIT_USAGE};
use homcount::structure::{from_json, to_json};
use homcount::transform::{make_clique, make_figure3_pair};
use homcount::{PointedStructure, Signature};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("homcount").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn save(dir: &Path, name: &str, m: &PointedStructure) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, to_json(m)).unwrap();
    p
}

fn chain(n: usize) -> PointedStructure {
    let mut b = PointedStructure::builder(Signature::standard(), n);
    for i in 1..n {
        b = b.edge("R", i - 1, i);
    }
    b.build().unwrap()
}

#[test]
fn figure_three_is_not_ml_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let (m, n) = make_figure3_pair();
    let (l, r) = (save(dir.path(), "M.json", &m), save(dir.path(), "N.json", &n));
    let (l, r) = (l.to_str().unwrap(), r.to_str().unwrap());
    let (code, out, _) = call(&["equiv", "--logic", "ml", "--left", l, "--right", r]);
    assert_eq!(code, EXIT_DIFFER);
    assert_eq!(out.trim(), "not equivalent");
    let (code, out, _) = call(&["equiv", "--logic", "pml", "--k", "2", "--left", l, "--right", r]);
    assert_eq!((code, out.trim()), (EXIT_OK, "equivalent"));
    let (code, _, err) = call(&["equiv", "--logic", "gml", "--left", l, "--right", r]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("depth"));
}

#[test]
fn hom_count_of_a_chain_into_a_clique() {
    let dir = tempfile::tempdir().unwrap();
    let t = save(dir.path(), "T3.json", &chain(3));
    let k = save(dir.path(), "K2.json", &make_clique(2, true));
    let (t, k) = (t.to_str().unwrap(), k.to_str().unwrap());
    let (code, out, _) = call(&["hom-count", "--semiring", "nat", "--source", t, "--target", k]);
    assert_eq!((code, out.trim()), (EXIT_OK, "4"));
    let (_, out, _) = call(&["hom-count", "--semiring", "modp:2", "--source", t, "--target", k]);
    assert_eq!(out.trim(), "0");
    let (code, _, _) = call(&["hom-count", "--semiring", "reals", "--source", t, "--target", k]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn transforms_emit_structures() {
    let dir = tempfile::tempdir().unwrap();
    let (m, _) = make_figure3_pair();
    let p = save(dir.path(), "M.json", &m);
    let p = p.to_str().unwrap();
    let (code, out, _) = call(&["transform", "unravel", "--k", "0", "--in", p]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(from_json(&out).unwrap().state_count(), 1);
    let (_, out, _) = call(&["transform", "backexp", "--in", p]);
    assert_eq!(from_json(&out).unwrap().signature().actions().len(), 2);
    let (_, out, _) = call(&["transform", "gsub", "--in", p, "--dot"]);
    assert!(out.starts_with("digraph"));
    let (code, _, _) = call(&["transform", "unravel", "--in", p]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = call(&["transform", "flip", "--in", p]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn classify_check_and_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let (m, n) = make_figure3_pair();
    let (l, r) = (save(dir.path(), "M.json", &m), save(dir.path(), "N.json", &n));
    let (l, r) = (l.to_str().unwrap(), r.to_str().unwrap());
    let (_, out, _) = call(&["classify", "--in", l]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["kinds"].as_array().unwrap().iter().any(|k| k == "tree"));
    assert_eq!(v["directedDepth"], 1);

    let (code, out, _) = call(&["check", "--in", l, "--formula", "<R>>=2 true"]);
    assert_eq!((code, out.trim()), (EXIT_OK, "true"));
    let (_, out, _) = call(&["check", "--in", r, "--formula", "<R>>=2 true"]);
    assert_eq!(out.trim(), "false");
    let (code, _, err) = call(&["check", "--in", r, "--formula", "<R> (p &"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("error"));

    let (code, out, _) = call(&["profile-compare", "--left", l, "--right", r, "--semiring", "bool", "--max-states", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("equal-up-to-bound"));
    let (code, out, _) = call(&["profile-compare", "--left", l, "--right", r, "--max-states", "3"]);
    assert_eq!(code, EXIT_DIFFER);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "distinguished");
    assert_eq!((v["countLeft"].as_str(), v["countRight"].as_str()), (Some("2"), Some("1")));
}

#[test]
fn enumerate_verify_and_demo() {
    let (code, out, _) = call(&["enumerate", "--class", "tree", "--max-states", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 6);
    for line in out.lines() {
        from_json(line).unwrap();
    }
    let (code, out, _) = call(&["verify", "--theorem", "T4.5", "--max-states", "2", "--depth", "2"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("PASS"));
    let (code, out, _) = call(&["verify", "--theorem", "Fact2.1", "--max-states", "2", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["agreements"], v["pairsTested"]);
    let (code, _, _) = call(&["verify", "--theorem", "T9.9"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, out, _) = call(&["negative-demo", "--semiring", "modp:3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("(i)"));
    let (code, _, _) = call(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("negative-demo"));
}
