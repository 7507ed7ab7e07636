use geobst::decomposition::decompose;
use geobst::geometry::{is_satisfied_set, Point};
use geobst::greedy::run_greedy;
use geobst::opt::*;
use geobst::perm::all_permutations;
use geobst::rgreedy::run_rgreedy;
use geobst::sequence::AccessSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn input_grid_matches_refined_grid() {
    let base = OptLimits::default();
    let fine = OptLimits { scale: 2, ..Default::default() };
    for n in 1..=4 {
        for p in all_permutations(n) {
            let x = AccessSequence::from_perm(p.clone()).unwrap();
            let a = brute_force_opt(&x, &base).unwrap().cost;
            let b = brute_force_opt(&x, &fine).unwrap().cost;
            assert_eq!(a, b, "{p:?}");
        }
    }
}

#[test]
fn opt_sandwiched_by_m_and_greedy() {
    let l = OptLimits::default();
    for p in all_permutations(6) {
        let x = AccessSequence::from_perm(p.clone()).unwrap();
        let r = brute_force_opt(&x, &l).unwrap();
        assert!(r.cost >= 6);
        assert!(r.cost <= run_greedy(&x, None).unwrap().cost());
        let t = decompose(&p).unwrap();
        assert!(r.cost <= run_rgreedy(&x, &t).unwrap().cost());
    }
}

#[test]
fn prefix_of_witness_is_feasible() {
    let l = OptLimits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(2..=8);
        let keys: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=n)).collect();
        let x = AccessSequence::new(n, keys.clone()).unwrap();
        let whole = brute_force_opt(&x, &l).unwrap();
        let cut = rng.gen_range(1..m);
        let prefix = AccessSequence::new(n, keys[..cut].to_vec()).unwrap();
        let restricted = whole.witness.restrict_rows(1, cut as i64);
        assert!(is_satisfied_set(&restricted));
        assert!(brute_force_opt(&prefix, &l).unwrap().cost <= restricted.weight());
    }
}

#[test]
fn block_lower_bound_sampled_n7() {
    let l = OptLimits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let mut p: Vec<usize> = (1..=7).collect();
        rand::seq::SliceRandom::shuffle(&mut p[..], &mut rng);
        let t = decompose(&p).unwrap();
        let (whole, rhs) = decomposition_lower_bound_check(&p, &t, &l).unwrap();
        assert!(whole as i64 >= rhs, "{p:?}");
    }
}

#[test]
fn split_merge_and_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(2..=12);
        let keys: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=n)).collect();
        let x = AccessSequence::new(n, keys).unwrap();
        let (p, map) = split_sequence(&x);
        assert!(p.is_permutation());
        assert_eq!(merge_sequence(&p, &map, n).unwrap(), x);
        let y = run_greedy(&x, None).unwrap().touch_grid();
        let s = split_satisfied_construction(&x, &y).unwrap();
        assert!(is_satisfied_set(&s.grid));
        assert!(s.grid.weight() <= 2 * y.weight() + 2 * m);
        let split_pts: Vec<Point> = p.access_grid().points().collect();
        assert_eq!(s.accesses, split_pts);
        let merged = merge_grid(&s.grid, &s.column_map).unwrap();
        assert!(is_satisfied_set(&merged));
        assert!(merged.weight() <= s.grid.weight());
    }
}
