use std::path::Path;

use geobst::harness::regress::{search, verify, Bounds, Detail, Target, Witness, TARGETS};

fn fixture(name: &str) -> Witness {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.json"));
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn stored_witnesses_still_verify() {
    for name in TARGETS {
        let w = fixture(name);
        assert_eq!(w.target, Target::parse(name).unwrap().name());
        assert!(verify(&w).unwrap(), "{name}");
    }
}

#[test]
fn tampered_witnesses_fail() {
    let mut w = fixture("pattern-counter");
    w.keys = vec![1, 2, 3, 4];
    assert!(!verify(&w).unwrap_or(false));
    let mut w = fixture("gadget-counter");
    if let Detail::Box { xmin, xmax, .. } = &mut w.detail {
        *xmin = 1;
        *xmax = w.keys.len();
    }
    assert!(!verify(&w).unwrap_or(false));
}

#[test]
fn search_is_deterministic_on_small_bounds() {
    let b = Bounds { max_n: 6, ..Bounds::default() };
    let t = Target::parse("pattern-counter").unwrap();
    let a = search(t, &b).unwrap().expect("witness at n <= 6");
    let c = search(t, &b).unwrap().unwrap();
    assert_eq!(a.keys, c.keys);
    assert!(verify(&a).unwrap());
}
