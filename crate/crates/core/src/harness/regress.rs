//! Searches for small instances showing where natural strengthenings of the
//! Greedy analysis break, and re-checks stored witnesses.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::decomposition::is_k_decomposable;
use crate::error::{invalid, Result};
use crate::generators::gen_path_preorder;
use crate::geometry::{Point, PointGrid};
use crate::greedy::run_greedy;
use crate::patterns::{Embedder, PatternMatrix};
use crate::perm::{all_permutations, rank_compress};
use crate::sequence::AccessSequence;
use crate::tree::InitialTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Input avoids (3,2,1) while the Greedy touch matrix contains it.
    PatternCounter,
    /// A block partition where a touched region maps to an untouched point
    /// of the contracted instance.
    DecompCounter,
    /// Path preorder plus initial tree, with an access-free box of touch
    /// points containing every permutation of a fixed size.
    GadgetCounter,
}

pub const TARGETS: &[&str] = &["pattern-counter", "decomp-counter", "gadget-counter"];

impl Target {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "pattern-counter" => Target::PatternCounter,
            "decomp-counter" => Target::DecompCounter,
            "gadget-counter" => Target::GadgetCounter,
            _ => return invalid(format!("unknown target {s:?}; expected one of {}", TARGETS.join(", "))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::PatternCounter => "pattern-counter",
            Target::DecompCounter => "decomp-counter",
            Target::GadgetCounter => "gadget-counter",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Bounds {
    /// Largest permutation size tried; exhaustive targets stop at 8.
    pub max_n: usize,
    /// Initial trees tried per path preorder when not all shapes fit.
    pub trees_per_input: usize,
    /// Path preorders sampled per size for gadget-counter.
    pub inputs_per_n: usize,
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_n: 10, trees_per_input: 200, inputs_per_n: 32, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub target: String,
    pub keys: Vec<usize>,
    /// Preorder of the initial tree, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<usize>>,
    pub detail: Detail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Detail {
    Occurrence { points: Vec<(usize, i64)> },
    Region {
        /// Last time of each block.
        cuts: Vec<usize>,
        skeleton: Vec<usize>,
        /// Key-block index and time-block index, 1-based.
        column: usize,
        row: usize,
    },
    Box { xmin: usize, xmax: usize, ymin: i64, ymax: i64, pattern_size: usize },
}

fn seq(keys: &[usize]) -> AccessSequence {
    AccessSequence::from_perm(keys.to_vec()).expect("permutation")
}

fn pattern_counter(p: &[usize]) -> Option<Detail> {
    let needle = PatternMatrix::from_perm(&[3, 2, 1]).expect("perm");
    if crate::patterns::perm_contains(p, &[3, 2, 1]) {
        return None;
    }
    let hay = run_greedy(&seq(p), None).ok()?.touch_grid();
    crate::patterns::find_occurrence(&hay, &needle)
        .map(|pts| Detail::Occurrence { points: pts.iter().map(|q| (q.x, q.y)).collect() })
}

/// Splits the times at `cuts` and checks the pieces are blocks. Returns
/// each block's key range, in time order.
fn block_ranges(p: &[usize], cuts: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut start = 0;
    for &c in cuts {
        let seg = &p[start..c];
        let lo = *seg.iter().min()?;
        let hi = *seg.iter().max()?;
        if hi - lo + 1 != seg.len() {
            return None;
        }
        out.push((lo, hi));
        start = c;
    }
    Some(out)
}

fn region_mismatch(p: &[usize], cuts: &[usize]) -> Option<Detail> {
    let ranges = block_ranges(p, cuts)?;
    let skeleton = rank_compress(&ranges.iter().map(|r| r.0).collect::<Vec<_>>());
    let touch = run_greedy(&seq(p), None).ok()?.touch_grid();
    let small = run_greedy(&seq(&skeleton), None).ok()?.touch_grid();
    let mut start = 1;
    for (j, &c) in cuts.iter().enumerate() {
        for (i, &(lo, hi)) in ranges.iter().enumerate() {
            let col = skeleton[i];
            let region = touch.in_box(lo, hi, start as i64, c as i64).next().is_some();
            let point = small.contains(&Point::new(col, j as i64 + 1));
            if region && !point {
                return Some(Detail::Region { cuts: cuts.to_vec(), skeleton, column: col, row: j + 1 });
            }
        }
        start = c + 1;
    }
    None
}

fn decomp_counter(p: &[usize]) -> Option<Detail> {
    if !is_k_decomposable(p, 2).ok()? {
        return None;
    }
    let n = p.len();
    for mask in 1u32..(1 << (n - 1)) {
        let mut cuts: Vec<usize> = (1..n).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
        cuts.push(n);
        // more than one block, and at least one block with two keys
        if cuts.len() == n {
            continue;
        }
        if let Some(d) = region_mismatch(p, &cuts) {
            return Some(d);
        }
    }
    None
}

fn sub_grid(g: &PointGrid, x1: usize, x2: usize, y1: i64, y2: i64) -> PointGrid {
    PointGrid::from_points(x2 - x1 + 1, g.in_box(x1, x2, y1, y2).map(|q| Point::new(q.x - x1 + 1, q.y)))
}

fn contains_all(g: &PointGrid, needles: &[PatternMatrix]) -> bool {
    needles.iter().all(|nd| {
        let mut found = false;
        let mut e = Embedder::new(g, nd);
        let _ = e.run(&mut |_: &[Point]| {
            found = true;
            ControlFlow::Break(())
        });
        found
    })
}

/// Maximal access-free boxes, as `(xmin, xmax, ymin, ymax)` over touch rows.
fn access_free_boxes(keys: &[usize]) -> Vec<(usize, usize, i64, i64)> {
    let n = keys.len();
    let m = keys.len() as i64;
    let mut out = Vec::new();
    for x1 in 1..=n {
        for x2 in x1..=n {
            let mut start = 1i64;
            for t in 1..=m + 1 {
                let hit = t > m || (x1..=x2).contains(&keys[t as usize - 1]);
                if hit {
                    if t > start {
                        out.push((x1, x2, start, t - 1));
                    }
                    start = t + 1;
                }
            }
        }
    }
    out
}

fn gadget_box(keys: &[usize], tree: &InitialTree, needles: &[PatternMatrix], s: usize) -> Option<Detail> {
    let trace = run_greedy(&seq(keys), Some(tree)).ok()?;
    let touch = trace.touch_grid();
    for (x1, x2, y1, y2) in access_free_boxes(keys) {
        if ((x2 - x1 + 1) as i64) < s as i64 || y2 - y1 + 1 < s as i64 {
            continue;
        }
        let g = sub_grid(&touch, x1, x2, y1, y2);
        if g.weight() >= s && contains_all(&g, needles) {
            return Some(Detail::Box { xmin: x1, xmax: x2, ymin: y1, ymax: y2, pattern_size: s });
        }
    }
    None
}

fn gadget_counter(bounds: &Bounds, s: usize) -> Option<Witness> {
    let needles: Vec<PatternMatrix> =
        all_permutations(s).iter().map(|p| PatternMatrix::from_perm(p).expect("perm")).collect();
    for n in s..=bounds.max_n {
        let mut inputs: Vec<Vec<usize>> = Vec::new();
        for i in 0..bounds.inputs_per_n as u64 {
            let k = gen_path_preorder(n, bounds.seed.wrapping_add(i)).ok()?.keys().to_vec();
            if !inputs.contains(&k) {
                inputs.push(k);
            }
        }
        let shapes = InitialTree::all_shapes(n);
        let trees: Vec<InitialTree> = if shapes.len() <= bounds.trees_per_input {
            shapes
        } else {
            (0..bounds.trees_per_input as u64)
                .filter_map(|i| InitialTree::random_seeded(n, bounds.seed.wrapping_mul(31).wrapping_add(i)).ok())
                .collect()
        };
        for keys in &inputs {
            for t in &trees {
                if let Some(d) = gadget_box(keys, t, &needles, s) {
                    return Some(Witness {
                        target: Target::GadgetCounter.name().into(),
                        keys: keys.clone(),
                        initial: Some(t.preorder()),
                        detail: d,
                    });
                }
            }
        }
    }
    None
}

/// Smallest witness found within `bounds`, searching sizes upward.
pub fn search(target: Target, bounds: &Bounds) -> Result<Option<Witness>> {
    let found = match target {
        Target::PatternCounter | Target::DecompCounter => {
            let check = if target == Target::PatternCounter { pattern_counter } else { decomp_counter };
            (1..=bounds.max_n.min(8)).find_map(|n| {
                all_permutations(n).into_iter().find_map(|p| {
                    check(&p).map(|d| Witness { target: target.name().into(), keys: p, initial: None, detail: d })
                })
            })
        }
        Target::GadgetCounter => gadget_counter(bounds, 3).or_else(|| gadget_counter(bounds, 2)),
    };
    Ok(found)
}

/// Re-derives the phenomenon from a stored witness.
pub fn verify(w: &Witness) -> Result<bool> {
    let target = Target::parse(&w.target)?;
    crate::perm::check_permutation(&w.keys)?;
    Ok(match (target, &w.detail) {
        (Target::PatternCounter, Detail::Occurrence { .. }) => pattern_counter(&w.keys).is_some(),
        (Target::DecompCounter, Detail::Region { cuts, .. }) => {
            is_k_decomposable(&w.keys, 2)? && region_mismatch(&w.keys, cuts).as_ref() == Some(&w.detail)
        }
        (Target::GadgetCounter, Detail::Box { xmin, xmax, ymin, ymax, pattern_size }) => {
            let Some(pre) = &w.initial else { return invalid("gadget witness needs an initial tree") };
            let tree = InitialTree::from_preorder(pre)?;
            let path_like = (0..w.keys.len()).all(|i| {
                let rest = &w.keys[i..];
                rest.iter().all(|&v| v >= rest[0]) || rest.iter().all(|&v| v <= rest[0])
            });
            let trace = run_greedy(&seq(&w.keys), Some(&tree))?;
            let free = w.keys.iter().enumerate().all(|(t, &k)| {
                let t = t as i64 + 1;
                !((*xmin..=*xmax).contains(&k) && (*ymin..=*ymax).contains(&t))
            });
            let needles: Vec<PatternMatrix> = all_permutations(*pattern_size)
                .iter()
                .map(|p| PatternMatrix::from_perm(p).expect("perm"))
                .collect();
            let g = sub_grid(&trace.touch_grid(), *xmin, *xmax, *ymin, *ymax);
            path_like && free && contains_all(&g, &needles)
        }
        _ => return invalid("witness detail does not match its target"),
    })
}
