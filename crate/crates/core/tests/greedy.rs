use geobst::geometry::{is_satisfied_set, Point, PointGrid};
use geobst::greedy::{run_greedy, run_greedy_sided, run_sgreedy, stair, ExecutionTrace, Side, TauState};
use geobst::invariants::{check_hidden, check_wings};
use geobst::perm::all_permutations;
use geobst::sequence::AccessSequence;
use geobst::tree::InitialTree;
use proptest::prelude::*;

fn seq_strategy() -> impl Strategy<Value = AccessSequence> {
    (1usize..9).prop_flat_map(|n| {
        proptest::collection::vec(1..=n, 1..14).prop_map(move |k| AccessSequence::new(n, k).unwrap())
    })
}

fn perm_strategy(max: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=max).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
}

/// Stair straight from the definition: `b` is touched when the rectangle
/// from `(a, t)` to the last point of column `b` holds nothing else.
fn stair_by_rectangles(g: &PointGrid, n: usize, a: usize, t: i64) -> Vec<usize> {
    let mut out = vec![a];
    for b in 1..=n {
        if b == a {
            continue;
        }
        let Some(tb) = g.column(b).filter(|&y| y < t).max() else { continue };
        let (x1, x2) = (a.min(b), a.max(b));
        let q = Point::new(b, tb);
        let empty = g.in_box(x1, x2, tb, t - 1).all(|p| p == q);
        if empty {
            out.push(b);
        }
    }
    out.sort_unstable();
    out
}

proptest! {
    #[test]
    fn stair_matches_rectangle_definition(x in seq_strategy(), tree_seed in any::<u64>(), with_tree in any::<bool>()) {
        let n = x.n();
        let tree = if with_tree { Some(InitialTree::random_seeded(n, tree_seed).unwrap()) } else { None };
        let mut st = TauState::new(n, tree.as_ref());
        let mut g = tree.as_ref().map(|t| t.encode()).unwrap_or_else(|| PointGrid::new(n));
        for (i, &a) in x.keys().iter().enumerate() {
            let t = i as i64 + 1;
            let s = stair(&st, a, t);
            prop_assert_eq!(&s, &stair_by_rectangles(&g, n, a, t));
            for &b in &s {
                st.set(b, t);
                g.insert(Point::new(b, t));
            }
        }
    }

    #[test]
    fn greedy_output_is_satisfied(x in seq_strategy(), tree_seed in any::<u64>()) {
        let tr = run_greedy(&x, None).unwrap();
        prop_assert!(is_satisfied_set(&tr.touch_grid()));
        let t = InitialTree::random_seeded(x.n(), tree_seed).unwrap();
        let tr = run_greedy(&x, Some(&t)).unwrap();
        prop_assert!(is_satisfied_set(&tr.combined_grid()));
    }

    #[test]
    fn trace_text_round_trip(x in seq_strategy(), tree_seed in any::<u64>()) {
        let t = InitialTree::random_seeded(x.n(), tree_seed).unwrap();
        let tr = run_greedy(&x, Some(&t)).unwrap();
        let back = ExecutionTrace::from_text(&tr.to_text()).unwrap();
        prop_assert_eq!(back, tr);
    }

    #[test]
    fn one_sided_runs_are_subsets(x in seq_strategy()) {
        let both = run_greedy(&x, None).unwrap();
        let s = run_sgreedy(&x, None).unwrap();
        for side in [s.left, s.right] {
            prop_assert!(side.cost() <= both.cost() + x.m() * x.n());
            prop_assert!(side.rows.iter().zip(x.keys()).all(|(r, k)| r.contains(k)));
        }
        prop_assert!(s.cost >= x.m());
    }

    #[test]
    fn preorders_cost_at_most_4n(p in perm_strategy(40)) {
        let (x, _) = geobst::generators::gen_preorder(p.len(), p[0] as u64).unwrap();
        let tr = run_greedy(&x, None).unwrap();
        prop_assert!(tr.cost() <= 4 * x.n());
        prop_assert!(check_wings(&tr).is_ok());
    }
}

#[test]
fn hidden_rules_one_sided() {
    for n in 1..=6 {
        for p in all_permutations(n) {
            let x = AccessSequence::from_perm(p.clone()).unwrap();
            for side in [Side::Left, Side::Right] {
                let tr = run_greedy_sided(&x, None, side).unwrap();
                assert!(check_hidden(&tr, side).is_ok(), "{p:?} {side:?}");
            }
        }
    }
}

#[test]
fn sided_greedy_rows() {
    let x = AccessSequence::from_perm(vec![2, 3, 1]).unwrap();
    let r = run_greedy_sided(&x, None, Side::Right).unwrap();
    assert_eq!(r.rows, vec![vec![2], vec![3], vec![1, 2, 3]]);
    let l = run_greedy_sided(&x, None, Side::Left).unwrap();
    assert_eq!(l.rows, vec![vec![2], vec![2, 3], vec![1]]);
}
