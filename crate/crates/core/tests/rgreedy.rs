use geobst::decomposition::{decompose, inflate, DecompositionTree, TreeBuilder};
use geobst::generators::{gen_k_decomposable, rng};
use geobst::geometry::is_satisfied_set;
use geobst::greedy::{run_greedy, stair, TauState};
use geobst::rgreedy::{decomposition_bound, greedy_indicator, run_rgreedy, run_rgreedy_instrumented};
use geobst::sequence::AccessSequence;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn shuffled(n: usize, r: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=n).collect();
    p.shuffle(r);
    p
}

/// Skeleton of arity `k` over leaves of random sizes, total size at most `max_n`.
fn two_level(k: usize, max_n: usize, seed: u64) -> (Vec<usize>, DecompositionTree) {
    let mut r = rng(seed);
    let sk = shuffled(k, &mut r);
    let per = (max_n / k).max(1);
    let leaves: Vec<Vec<usize>> = (0..k).map(|_| shuffled(r.gen_range(1..=per), &mut r)).collect();
    let p = inflate(&sk, &leaves).unwrap();
    let mut b = TreeBuilder::new();
    let kids: Vec<usize> = leaves.into_iter().map(|l| b.leaf(l)).collect();
    let root = b.internal(sk.clone(), kids);
    let t = b.finish(root).unwrap();
    assert_eq!(t.inflate(), p);
    (p, t)
}

#[test]
fn completed_region_matches_greedy_on_skeleton() {
    let mut checked = 0;
    for seed in 0..300u64 {
        let k = 2 + (seed as usize % 7);
        let (p, t) = two_level(k, 64, seed);
        let x = AccessSequence::from_perm(p.clone()).unwrap();
        let run = run_rgreedy_instrumented(&x, &t).unwrap();
        let sk = t.node(t.root()).skeleton().unwrap().to_vec();
        let snap = run.region_snapshots.iter().find(|(v, _)| *v == t.root()).expect("root snapshot");
        assert_eq!(snap.1, greedy_indicator(&sk), "{p:?}");
        checked += 1;
    }
    assert_eq!(checked, 300);
}

#[test]
fn nested_regions_match_greedy_on_their_skeletons() {
    for seed in 0..200u64 {
        let n = 4 + seed as usize % 40;
        let (x, t) = gen_k_decomposable(n, 3, seed).unwrap();
        let run = run_rgreedy_instrumented(&x, &t).unwrap();
        for (v, m) in &run.region_snapshots {
            let sk = t.node(*v).skeleton().unwrap();
            assert_eq!(m, &greedy_indicator(sk), "node {v} in {:?}", x.keys());
        }
    }
}

proptest! {
    #[test]
    fn rgreedy_extends_its_own_greedy_steps(k in 2usize..6, seed in any::<u64>()) {
        let (p, t) = two_level(k, 40, seed);
        let x = AccessSequence::from_perm(p).unwrap();
        let tr = run_rgreedy(&x, &t).unwrap();
        let mut st = TauState::new(x.n(), None);
        for (i, row) in tr.rows.iter().enumerate() {
            let tt = i as i64 + 1;
            for b in stair(&st, x.at(i + 1), tt) {
                prop_assert!(row.contains(&b));
            }
            for &b in row {
                st.set(b, tt);
            }
        }
        prop_assert!(is_satisfied_set(&tr.touch_grid()));
    }

    #[test]
    fn bound_holds_on_decomposable(n in 2usize..60, k in 2usize..5, seed in any::<u64>()) {
        let (x, t) = gen_k_decomposable(n, k, seed).unwrap();
        let (b, tr) = decomposition_bound(&x, &t).unwrap();
        prop_assert!(b.holds(), "{:?}", b);
        prop_assert!(is_satisfied_set(&tr.touch_grid()));
    }

    #[test]
    fn canonical_tree_also_works(p in (2usize..30).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())) {
        let t = decompose(&p).unwrap();
        let x = AccessSequence::from_perm(p).unwrap();
        let (b, tr) = decomposition_bound(&x, &t).unwrap();
        prop_assert!(b.holds());
        prop_assert!(is_satisfied_set(&tr.touch_grid()));
    }
}

#[test]
fn single_leaf_dominates_greedy() {
    for seed in 0..50u64 {
        let p = shuffled(12, &mut rng(seed));
        let x = AccessSequence::from_perm(p.clone()).unwrap();
        let t = DecompositionTree::single_leaf(&p).unwrap();
        let r = run_rgreedy(&x, &t).unwrap();
        let g = run_greedy(&x, None).unwrap();
        assert!(r.cost() >= g.cost());
        assert!(g.rows.iter().zip(&r.rows).all(|(a, b)| a.iter().all(|c| b.contains(c))));
    }
}

#[test]
fn rejects_mismatched_tree() {
    let t = decompose(&[2, 1, 3]).unwrap();
    let x = AccessSequence::from_perm(vec![1, 2, 3]).unwrap();
    assert!(run_rgreedy(&x, &t).is_err());
    let y = AccessSequence::new(3, vec![1, 1]).unwrap();
    assert!(run_rgreedy(&y, &t).is_err());
}
