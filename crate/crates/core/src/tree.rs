//! BST shapes over `1..=n` and their stack encoding below the first row.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point, PointGrid};
use crate::perm::{format_list, parse_list};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialTree {
    n: usize,
    root: usize,
    left: Vec<Option<usize>>,
    right: Vec<Option<usize>>,
    depth: Vec<usize>, // root has depth 1; index 0 unused
}

impl InitialTree {
    /// The BST whose preorder traversal is `pre`.
    pub fn from_preorder(pre: &[usize]) -> Result<Self> {
        let n = pre.len();
        if n == 0 || !crate::perm::is_permutation(pre) {
            return invalid("preorder must be a nonempty permutation");
        }
        let mut left = vec![None; n + 1];
        let mut right = vec![None; n + 1];
        let root = pre[0];
        for &k in &pre[1..] {
            let mut cur = root;
            loop {
                let slot = if k < cur { &mut left[cur] } else { &mut right[cur] };
                match *slot {
                    Some(c) => cur = c,
                    None => {
                        *slot = Some(k);
                        break;
                    }
                }
            }
        }
        let t = Self::assemble(n, root, left, right);
        if t.preorder() != pre {
            return invalid(format!("({}) is not the preorder of any BST", format_list(pre)));
        }
        Ok(t)
    }

    fn assemble(n: usize, root: usize, left: Vec<Option<usize>>, right: Vec<Option<usize>>) -> Self {
        let mut depth = vec![0; n + 1];
        let mut stack = vec![(root, 1)];
        while let Some((v, d)) = stack.pop() {
            depth[v] = d;
            for c in [left[v], right[v]].into_iter().flatten() {
                stack.push((c, d + 1));
            }
        }
        InitialTree { n, root, left, right, depth }
    }

    fn from_splitter(n: usize, mut pick: impl FnMut(usize, usize) -> usize) -> Result<Self> {
        if n == 0 {
            return invalid("tree needs n >= 1");
        }
        let mut left = vec![None; n + 1];
        let mut right = vec![None; n + 1];
        let root = pick(1, n);
        let mut stack = vec![(root, 1, n)];
        while let Some((r, lo, hi)) = stack.pop() {
            if lo < r {
                let c = pick(lo, r - 1);
                left[r] = Some(c);
                stack.push((c, lo, r - 1));
            }
            if r < hi {
                let c = pick(r + 1, hi);
                right[r] = Some(c);
                stack.push((c, r + 1, hi));
            }
        }
        Ok(Self::assemble(n, root, left, right))
    }

    /// Perfectly balanced shape (middle key at every level).
    pub fn balanced(n: usize) -> Result<Self> {
        Self::from_splitter(n, |lo, hi| (lo + hi) / 2)
    }

    /// Random shape by uniform recursive root choice.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Result<Self> {
        Self::from_splitter(n, |lo, hi| rng.gen_range(lo..=hi))
    }

    pub fn random_seeded(n: usize, seed: u64) -> Result<Self> {
        Self::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Every BST shape on `n` keys (Catalan many).
    pub fn all_shapes(n: usize) -> Vec<InitialTree> {
        fn pre(lo: usize, hi: usize) -> Vec<Vec<usize>> {
            if lo > hi {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for r in lo..=hi {
                let ls = pre(lo, r - 1);
                let rs = pre(r + 1, hi);
                for l in &ls {
                    for rr in &rs {
                        let mut v = vec![r];
                        v.extend(l);
                        v.extend(rr);
                        out.push(v);
                    }
                }
            }
            out
        }
        if n == 0 {
            return Vec::new();
        }
        pre(1, n)
            .into_iter()
            .map(|p| Self::from_preorder(&p).expect("generated preorder"))
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn root(&self) -> usize {
        self.root
    }
    pub fn left(&self, v: usize) -> Option<usize> {
        self.left[v]
    }
    pub fn right(&self, v: usize) -> Option<usize> {
        self.right[v]
    }
    pub fn depth_of(&self, v: usize) -> usize {
        self.depth[v]
    }
    pub fn depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            if let Some(r) = self.right[v] {
                stack.push(r);
            }
            if let Some(l) = self.left[v] {
                stack.push(l);
            }
        }
        out
    }

    /// Keys on the search path from the root to `a`, sorted.
    pub fn path(&self, a: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = Some(self.root);
        while let Some(v) = cur {
            out.push(v);
            cur = match a.cmp(&v) {
                std::cmp::Ordering::Less => self.left[v],
                std::cmp::Ordering::Greater => self.right[v],
                std::cmp::Ordering::Equal => None,
            };
        }
        out.sort_unstable();
        out
    }

    /// Column `x` gets a stack of `d - d(x) + 1` points. All stacks share the
    /// bottom row `1 - d`, so the root's stack tops out at row 0 and shallower
    /// keys stand taller.
    pub fn encode(&self) -> PointGrid {
        let d = self.depth() as i64;
        let mut g = PointGrid::new(self.n);
        for x in 1..=self.n {
            let h = d - self.depth[x] as i64 + 1;
            for y in (1 - d)..(1 - d + h) {
                g.insert(Point::new(x, y));
            }
        }
        g
    }
}

/// `none`, `balanced`, `random:SEED` or `preorder:2,1,3`.
pub fn parse_initial_spec(spec: &str, n: usize) -> Result<Option<InitialTree>> {
    let spec = spec.trim();
    if spec == "none" {
        return Ok(None);
    }
    if spec == "balanced" {
        return InitialTree::balanced(n).map(Some);
    }
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| Error::Parse(format!("bad seed in {spec:?}")))?;
        return InitialTree::random_seeded(n, seed).map(Some);
    }
    if let Some(list) = spec.strip_prefix("preorder:") {
        let pre = parse_list(list)?;
        if pre.len() != n {
            return invalid(format!("tree has {} keys but the sequence needs {n}", pre.len()));
        }
        return InitialTree::from_preorder(&pre).map(Some);
    }
    Err(Error::Parse(format!("unknown initial tree {spec:?}")))
}

pub fn initial_spec_string(t: Option<&InitialTree>) -> String {
    match t {
        None => "none".to_string(),
        Some(t) => format!("preorder:{}", format_list(&t.preorder())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_three() {
        let t = InitialTree::balanced(3).unwrap();
        assert_eq!(t.root(), 2);
        assert_eq!(t.depth(), 2);
        let g = t.encode();
        assert_eq!(g.column(2).count(), 2);
        assert_eq!(g.column(1).count(), 1);
        assert_eq!(g.column(3).count(), 1);
        assert_eq!(g.max_row(), Some(0));
        assert!(crate::geometry::is_satisfied_set(&g));
    }

    #[test]
    fn preorder_round_trip() {
        let t = InitialTree::from_preorder(&[3, 1, 2, 5, 4]).unwrap();
        assert_eq!(t.preorder(), vec![3, 1, 2, 5, 4]);
        assert_eq!(t.path(4), vec![3, 4, 5]);
        assert!(InitialTree::from_preorder(&[2, 3, 1]).is_err());
    }

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| InitialTree::all_shapes(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42]);
    }

    #[test]
    fn spec_strings() {
        assert!(parse_initial_spec("none", 3).unwrap().is_none());
        let t = parse_initial_spec("preorder:2,1,3", 3).unwrap().unwrap();
        assert_eq!(initial_spec_string(Some(&t)), "preorder:2,1,3");
        assert!(parse_initial_spec("preorder:1,2", 3).is_err());
        assert!(parse_initial_spec("bogus", 3).is_err());
        let a = parse_initial_spec("random:7", 9).unwrap().unwrap();
        let b = parse_initial_spec("random:7", 9).unwrap().unwrap();
        assert_eq!(a, b);
    }
}
