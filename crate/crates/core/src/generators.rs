//! Seeded generators for the input classes.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{DecompositionTree, TreeBuilder};
use crate::error::{invalid, Result};
use crate::perm::{identity, rank_compress};
use crate::sequence::AccessSequence;
use crate::tree::InitialTree;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn seq(p: Vec<usize>) -> AccessSequence {
    AccessSequence::from_perm(p).expect("generator output is a permutation")
}

/// Preorder of a random BST shape, together with the shape.
pub fn gen_preorder(n: usize, seed: u64) -> Result<(AccessSequence, InitialTree)> {
    if n == 0 {
        return invalid("preorder needs n >= 1");
    }
    let t = InitialTree::random(n, &mut rng(seed))?;
    Ok((seq(t.preorder()), t))
}

pub fn gen_sequential(n: usize) -> AccessSequence {
    seq(identity(n))
}

/// Uniform interleaving of `k - 1` increasing runs that partition `1..=n`.
pub fn gen_k_increasing(n: usize, k: usize, seed: u64) -> Result<AccessSequence> {
    if k < 2 || k > n.max(2) {
        return invalid(format!("k-increasing needs 2 <= k <= n, got k={k}, n={n}"));
    }
    let mut r = rng(seed);
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); k - 1];
    for v in 1..=n {
        classes[r.gen_range(0..k - 1)].push(v);
    }
    let mut heads = vec![0usize; k - 1];
    let mut left = n;
    let mut out = Vec::with_capacity(n);
    while left > 0 {
        // choose a class with probability proportional to what it has left
        let mut pick = r.gen_range(0..left);
        for (c, cl) in classes.iter().enumerate() {
            let rem = cl.len() - heads[c];
            if pick < rem {
                out.push(cl[heads[c]]);
                heads[c] += 1;
                break;
            }
            pick -= rem;
        }
        left -= 1;
    }
    Ok(seq(out))
}

fn random_perm<R: Rng>(s: usize, r: &mut R) -> Vec<usize> {
    let mut p = identity(s);
    p.shuffle(r);
    p
}

/// Random tree of arity at most `k` with random skeletons, inflated to size `n`.
pub fn gen_k_decomposable(n: usize, k: usize, seed: u64) -> Result<(AccessSequence, DecompositionTree)> {
    if k < 2 {
        return invalid("k-decomposable needs k >= 2");
    }
    if n == 0 {
        return invalid("k-decomposable needs n >= 1");
    }
    let mut r = rng(seed);
    let mut b = TreeBuilder::new();
    fn build<R: Rng>(s: usize, k: usize, r: &mut R, b: &mut TreeBuilder) -> usize {
        if s == 1 {
            return b.leaf(vec![1]);
        }
        if s <= k && r.gen_bool(0.3) {
            return b.leaf(random_perm(s, r));
        }
        let arity = r.gen_range(2..=k.min(s));
        if arity == s {
            return b.leaf(random_perm(s, r));
        }
        let mut sizes = vec![s / arity; arity];
        let extra = s % arity;
        let mut idx: Vec<usize> = (0..arity).collect();
        idx.shuffle(r);
        for &i in idx.iter().take(extra) {
            sizes[i] += 1;
        }
        let kids: Vec<usize> = sizes.iter().map(|&cs| build(cs, k, r, b)).collect();
        b.internal(random_perm(arity, r), kids)
    }
    let root = build(n, k, &mut r, &mut b);
    let tree = b.finish(root)?;
    Ok((seq(tree.inflate()), tree))
}

/// The points `(i*l + j - 1, j*l + i - 1)` ranked on both axes and read in
/// time order.
pub fn gen_perturbed_grid(l: usize) -> Result<AccessSequence> {
    if l == 0 {
        return invalid("perturbed grid needs l >= 1");
    }
    let mut pts = Vec::with_capacity(l * l);
    for i in 1..=l {
        for j in 1..=l {
            pts.push((i * l + j - 1, j * l + i - 1));
        }
    }
    let mut xs: Vec<usize> = pts.iter().map(|p| p.0).collect();
    let mut ys: Vec<usize> = pts.iter().map(|p| p.1).collect();
    xs.sort_unstable();
    ys.sort_unstable();
    if xs.windows(2).any(|w| w[0] == w[1]) || ys.windows(2).any(|w| w[0] == w[1]) {
        return invalid("perturbed grid points share a coordinate");
    }
    pts.sort_by_key(|p| p.1);
    let keys: Vec<usize> = pts.iter().map(|p| p.0).collect();
    Ok(seq(rank_compress(&keys)))
}

/// Random skeleton of size `n / b` over increasing leaf runs of length
/// `b = floor(log2 n)`.
pub fn gen_cole_showcase(n: usize, seed: u64) -> Result<(AccessSequence, DecompositionTree)> {
    if n < 2 {
        return invalid("showcase needs n >= 2");
    }
    let b = n.ilog2() as usize;
    if !n.is_multiple_of(b) {
        return invalid(format!("floor(log2 {n}) = {b} does not divide {n}"));
    }
    let blocks = n / b;
    let mut tb = TreeBuilder::new();
    let tree = if blocks == 1 {
        let r = tb.leaf(identity(b));
        tb.finish(r)?
    } else {
        let skel = random_perm(blocks, &mut rng(seed));
        let kids: Vec<usize> = (0..blocks).map(|_| tb.leaf(identity(b))).collect();
        let r = tb.internal(skel, kids);
        tb.finish(r)?
    };
    Ok((seq(tree.inflate()), tree))
}

/// Preorder of a random path: each step takes the smallest or largest
/// remaining key.
pub fn gen_path_preorder(n: usize, seed: u64) -> Result<AccessSequence> {
    if n == 0 {
        return invalid("path preorder needs n >= 1");
    }
    let mut r = rng(seed);
    let (mut lo, mut hi) = (1, n);
    let mut out = Vec::with_capacity(n);
    while lo <= hi {
        if r.gen_bool(0.5) {
            out.push(lo);
            lo += 1;
        } else {
            out.push(hi);
            hi -= 1;
        }
    }
    Ok(seq(out))
}

pub fn gen_random_permutation(n: usize, seed: u64) -> AccessSequence {
    seq(random_perm(n, &mut rng(seed)))
}

/// A random permutation avoiding `pattern`, which must have size 3. Preorders
/// avoid (2,3,1) and the other non-monotone patterns follow by reversal and
/// complement; (3,2,1)-avoiders are merges of two increasing runs.
pub fn gen_avoiding(pattern: &[usize], n: usize, seed: u64) -> Result<AccessSequence> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let rev = |p: Vec<usize>| p.into_iter().rev().collect::<Vec<_>>();
    let comp = |p: Vec<usize>| p.into_iter().map(|v| n + 1 - v).collect::<Vec<_>>();
    let pre = || gen_preorder(n, seed).map(|(x, _)| x.keys().to_vec());
    let p = match pattern {
        [2, 3, 1] => pre()?,
        [1, 3, 2] => rev(pre()?),
        [2, 1, 3] => comp(pre()?),
        [3, 1, 2] => rev(comp(pre()?)),
        [3, 2, 1] => two_runs(n, &mut rng(seed)),
        [1, 2, 3] => comp(two_runs(n, &mut rng(seed))),
        _ => return invalid(format!("no avoiding generator for pattern {pattern:?}")),
    };
    Ok(seq(p))
}

fn two_runs(n: usize, r: &mut ChaCha8Rng) -> Vec<usize> {
    let size = r.gen_range(0..=n);
    let mut pos: Vec<usize> = (0..n).collect();
    let mut val: Vec<usize> = (1..=n).collect();
    pos.shuffle(r);
    val.shuffle(r);
    let mut first_pos = pos[..size].to_vec();
    let mut first_val = val[..size].to_vec();
    first_pos.sort_unstable();
    first_val.sort_unstable();
    let mut rest_val = val[size..].to_vec();
    rest_val.sort_unstable();
    let mut out = vec![0; n];
    for (&p, &v) in first_pos.iter().zip(&first_val) {
        out[p] = v;
    }
    let mut it = rest_val.into_iter();
    for slot in out.iter_mut().filter(|s| **s == 0) {
        *slot = it.next().expect("sizes agree");
    }
    out
}

/// Generator classes by CLI name.
pub const CLASSES: &[&str] = &[
    "preorder",
    "sequential",
    "k-increasing",
    "k-decomposable",
    "perturbed",
    "cole",
    "path-preorder",
    "random",
];

/// Dispatch by class name. `perturbed` reads `n` as the side length when it is
/// not a perfect square.
pub fn gen_class(class: &str, n: usize, k: usize, seed: u64) -> Result<(AccessSequence, Option<DecompositionTree>)> {
    Ok(match class {
        "preorder" => (gen_preorder(n, seed)?.0, None),
        "sequential" => (gen_sequential(n), None),
        "k-increasing" => (gen_k_increasing(n, k, seed)?, None),
        "k-decomposable" => {
            let (x, t) = gen_k_decomposable(n, k, seed)?;
            (x, Some(t))
        }
        "perturbed" => {
            let side = (n as f64).sqrt().round() as usize;
            let l = if side * side == n { side } else { n };
            (gen_perturbed_grid(l)?, None)
        }
        "cole" => {
            let (x, t) = gen_cole_showcase(n, seed)?;
            (x, Some(t))
        }
        "path-preorder" => (gen_path_preorder(n, seed)?, None),
        "random" => (gen_random_permutation(n, seed), None),
        other => return invalid(format!("unknown class {other:?}; expected one of {}", CLASSES.join(", "))),
    })
}
