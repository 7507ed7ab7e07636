use geobst::geometry::{Point, PointGrid};
use geobst::patterns::{avoidance_parameter, cap, contains, find_occurrence, parse_pattern, perm_contains, PatternMatrix};
use geobst::perm::{all_permutations, restrict};
use proptest::prelude::*;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn brute_contains(x: &[usize], pi: &[usize]) -> bool {
    pi.len() <= x.len() && subsets(x.len(), pi.len()).iter().any(|s| restrict(x, s) == pi)
}

fn perm_strategy(lo: usize, hi: usize) -> impl Strategy<Value = Vec<usize>> {
    (lo..=hi).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
}

proptest! {
    #[test]
    fn containment_matches_subsets(x in perm_strategy(1, 9), pi in perm_strategy(1, 4)) {
        prop_assert_eq!(perm_contains(&x, &pi), brute_contains(&x, &pi));
        let g = PointGrid::from_points(x.len(), x.iter().enumerate().map(|(i, &v)| Point::new(v, i as i64 + 1)));
        let m = PatternMatrix::from_perm(&pi).unwrap();
        prop_assert_eq!(contains(&g, &m), brute_contains(&x, &pi));
        if let Some(occ) = find_occurrence(&g, &m) {
            prop_assert_eq!(occ.len(), pi.len());
            let mut ys: Vec<i64> = occ.iter().map(|p| p.y).collect();
            ys.sort_unstable();
            ys.dedup();
            prop_assert_eq!(ys.len(), pi.len());
        }
    }

    #[test]
    fn avoidance_parameter_is_least_k(x in perm_strategy(1, 8)) {
        let k = avoidance_parameter(&x, 9).unwrap();
        prop_assert!(all_permutations(k).iter().any(|p| !perm_contains(&x, p)));
        if k > 1 {
            prop_assert!(all_permutations(k - 1).iter().all(|p| perm_contains(&x, p)));
        }
    }
}

#[test]
fn cap_in_grid() {
    let c = cap();
    // a touched "hat": middle column higher than both sides
    let g = PointGrid::from_points(3, [Point::new(1, 1), Point::new(2, 2), Point::new(3, 1)]);
    assert!(contains(&g, &c));
    let flat = PointGrid::from_points(3, [Point::new(1, 2), Point::new(2, 1), Point::new(3, 2)]);
    assert!(!contains(&flat, &c));
    assert!(parse_pattern("cap").is_ok());
    assert!(parse_pattern("2,1,3").is_ok());
    assert!(parse_pattern("bogus").is_err());
}
