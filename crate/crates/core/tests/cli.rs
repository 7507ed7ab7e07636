use std::path::PathBuf;

use geobst::cli::{run, EXIT_FAIL, EXIT_LIMIT, EXIT_OK, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut full = vec!["geobst"];
    full.extend_from_slice(args);
    let code = run(full, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("geobst-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d.join(name)
}

#[test]
fn gen_run_verify_round_trip() {
    let (c, seq) = call(&["gen", "--class", "k-decomposable", "--n", "20", "--k", "3", "--seed", "4"]);
    assert_eq!(c, EXIT_OK);
    let f = scratch("x.txt");
    std::fs::write(&f, &seq).unwrap();
    let fs = f.to_str().unwrap();
    for alg in ["greedy", "greedy-left", "greedy-right", "sgreedy", "rgreedy"] {
        let (c, o) = call(&["run", "--alg", alg, "--input", fs]);
        assert_eq!(c, EXIT_OK, "{alg}");
        assert!(o.starts_with("cost "), "{o}");
    }
    let (c, tr) = call(&["run", "--input", fs, "--initial", "random:7", "--emit-trace"]);
    assert_eq!(c, EXIT_OK);
    let t = scratch("t.txt");
    let trace: String = tr.lines().filter(|l| !l.starts_with("cost ")).map(|l| format!("{l}\n")).collect();
    std::fs::write(&t, trace).unwrap();
    let (c, o) = call(&["verify", "--trace", t.to_str().unwrap(), "--with-initial"]);
    assert_eq!((c, o.starts_with("satisfied")), (EXIT_OK, true), "{o}");
}

#[test]
fn verify_reports_unsatisfied_grid() {
    let g = scratch("g.txt");
    std::fs::write(&g, "2 2\n1 1\n2 2\n").unwrap();
    let (c, o) = call(&["verify", "--grid", g.to_str().unwrap()]);
    assert_eq!(c, EXIT_FAIL);
    assert!(o.contains("(1, 1) and (2, 2)"), "{o}");
}

#[test]
fn decompose_and_pattern() {
    let (c, o) = call(&["decompose", "--perm", "2,4,1,3,5"]);
    assert_eq!(c, EXIT_OK);
    assert!(!o.trim().is_empty());
    let (c, o) = call(&["decompose", "--perm", "2,4,1,3", "--k", "3"]);
    assert_eq!((c, o.trim()), (EXIT_FAIL, "not 3-decomposable"));
    let (c, o) = call(&["pattern", "--pattern", "2,3,1", "--perm", "3,4,1,2"]);
    assert_eq!(c, EXIT_OK);
    assert!(o.starts_with("contains"), "{o}");
    let (_, o) = call(&["pattern", "--pattern", "2,3,1", "--perm", "1,2,3,4"]);
    assert_eq!(o.trim(), "avoids");
}

#[test]
fn opt_exit_codes() {
    let (c, o) = call(&["opt", "--perm", "2,1,3"]);
    assert_eq!(c, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(o.trim()).unwrap();
    assert_eq!(v["exact"], true);
    assert_eq!(c, EXIT_OK);
    let (c, _) = call(&["opt", "--perm", "3,1,4,2,5,7,6", "--node-cap", "2"]);
    assert_eq!(c, EXIT_LIMIT);
    let (c, o) = call(&["opt", "--perm", "3,1,4,2,5,7,6", "--node-cap", "2", "--allow-inexact"]);
    assert_eq!(c, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(o.trim()).unwrap();
    assert_eq!(v["exact"], false);
    let (c, _) = call(&["opt", "--perm", "1,2,3,4,5,6,7,8,9", "--max-n", "8"]);
    assert_ne!(c, EXIT_OK);
    let (c, o) = call(&["opt", "--perm", "2,1,3", "--lower-bound"]);
    assert_eq!(c, EXIT_OK);
    assert!(o.contains("true"));
    let f = scratch("rep.txt");
    std::fs::write(&f, "3 3\n2 1 2\n").unwrap();
    let (c, o) = call(&["opt", "--input", f.to_str().unwrap(), "--split"]);
    assert_eq!(c, EXIT_OK);
    assert!(o.contains("map 1,2,2"), "{o}");
}

#[test]
fn usage_errors() {
    assert_eq!(call(&["gen", "--class", "nope", "--n", "4"]).0, EXIT_USAGE);
    assert_eq!(call(&["run", "--perm", "1,1"]).0, EXIT_USAGE);
    assert_eq!(call(&["run", "--perm", "1,2", "--alg", "fancy"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["run"]).0, EXIT_USAGE);
    assert_eq!(call(&["experiment", "--suite", "nope"]).0, EXIT_USAGE);
}

#[test]
fn experiment_output_formats() {
    let (c, o) = call(&["experiment", "--suite", "preorder-bound", "--n", "8", "--seeds", "3"]);
    assert_eq!(c, EXIT_OK);
    let mut lines = o.lines();
    assert_eq!(lines.next(), Some(geobst::harness::experiment::CSV_HEADER));
    assert_eq!(lines.count(), 3);
    let (c, o) = call(&["experiment", "--suite", "sequential", "--n", "16", "--json"]);
    assert_eq!(c, EXIT_OK);
    for l in o.lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["pass"], true);
    }
    let (a, b) = (call(&["experiment", "--suite", "preorder-bound", "--n", "9", "--seed", "5"]).1, call(&["experiment", "--suite", "preorder-bound", "--n", "9", "--seed", "5"]).1);
    let strip = |s: &str| s.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
}
