use geobst::gadgets::{find_gadget_violations, GadgetMode, DEFAULT_NODE_CAP};
use geobst::generators::{gen_avoiding, gen_k_increasing, gen_random_permutation, rng};
use geobst::greedy::{run_greedy, run_greedy_sided, Side};
use geobst::patterns::{alt, cap, contains, inc, PatternMatrix};
use geobst::perm::all_permutations;
use geobst::sequence::AccessSequence;
use geobst::tree::InitialTree;
use rand::Rng;

#[test]
fn cap_tensor_shows_up_when_input_contains_pattern() {
    // the avoidance checks would be empty if the tensor never matched anything
    for p in all_permutations(3) {
        let needle = PatternMatrix::from_perm(&p).unwrap().tensor(&cap());
        let mut hits = 0;
        for seed in 0..60u64 {
            let x = gen_random_permutation(14, seed);
            let t = InitialTree::random_seeded(14, seed).unwrap();
            if contains(&run_greedy(&x, Some(&t)).unwrap().touch_grid(), &needle) {
                hits += 1;
            }
        }
        assert!(hits > 0, "{p:?}");
    }
}

#[test]
fn avoiders_never_reveal_the_pattern() {
    for p in all_permutations(3) {
        let pm = PatternMatrix::from_perm(&p).unwrap();
        let needles = [
            (Side::Both, pm.tensor(&cap())),
            (Side::Right, pm.tensor(&PatternMatrix::from_perm(&[1, 2]).unwrap())),
            (Side::Left, pm.tensor(&PatternMatrix::from_perm(&[2, 1]).unwrap())),
        ];
        for seed in 0..25u64 {
            let n = 3 + rng(seed).gen_range(0..14);
            let x = gen_avoiding(&p, n, seed).unwrap();
            let t = InitialTree::random_seeded(n, seed).unwrap();
            for (side, needle) in &needles {
                let tr = run_greedy_sided(&x, Some(&t), *side).unwrap();
                assert!(!contains(&tr.touch_grid(), needle), "{p:?} {side:?} {:?}", x.keys());
            }
        }
    }
}

#[test]
fn cap_boxes_capture_accesses() {
    for seed in 0..60u64 {
        let n = 4 + seed as usize % 20;
        let x = gen_random_permutation(n, seed);
        for t in [None, Some(InitialTree::random_seeded(n, seed).unwrap())] {
            let tr = run_greedy(&x, t.as_ref()).unwrap();
            assert!(find_gadget_violations(&tr, &cap(), GadgetMode::Capture, DEFAULT_NODE_CAP).unwrap().is_empty());
        }
    }
}

#[test]
fn increasing_gadget_needs_its_alternative() {
    let mut strict = 0;
    for seed in 0..60u64 {
        let n = 6 + seed as usize % 16;
        let x = gen_k_increasing(n, 3, seed).unwrap();
        let tr = run_greedy(&x, None).unwrap();
        for k in 1..=2 {
            let g = PatternMatrix::from_perm(&inc(k + 1)).unwrap();
            assert!(find_gadget_violations(&tr, &g, GadgetMode::Increasing(k), DEFAULT_NODE_CAP).unwrap().is_empty());
            strict += find_gadget_violations(&tr, &g, GadgetMode::Capture, DEFAULT_NODE_CAP).unwrap().len();
        }
    }
    // capture alone does not explain inc gadgets
    assert!(strict > 0);
}

#[test]
fn wrong_mode_is_caught() {
    let mut v = 0;
    for seed in 0..40u64 {
        let x = gen_k_increasing(16, 3, seed).unwrap();
        let tr = run_greedy(&x, None).unwrap();
        let g = PatternMatrix::from_perm(&inc(3)).unwrap();
        v += find_gadget_violations(&tr, &g, GadgetMode::Decreasing(2), DEFAULT_NODE_CAP).unwrap().len();
    }
    assert!(v > 0);
    let x = gen_random_permutation(10, 3);
    let tr = run_greedy(&x, None).unwrap();
    let g = PatternMatrix::from_perm(&alt(4)).unwrap();
    assert!(find_gadget_violations(&tr, &g, GadgetMode::Alternating(4), DEFAULT_NODE_CAP).is_ok());
}

#[test]
fn node_cap_is_reported() {
    let x = AccessSequence::from_perm((1..=30).rev().collect()).unwrap();
    let tr = run_greedy(&x, None).unwrap();
    let g = PatternMatrix::from_perm(&inc(4)).unwrap();
    assert!(find_gadget_violations(&tr, &g, GadgetMode::Capture, 10).is_err());
    assert!(GadgetMode::parse("increasing:2").is_ok());
    assert!(GadgetMode::parse("sideways").is_err());
}
