//! Offline robust Greedy driven by a decomposition tree.
//!
//! Each step runs the Greedy step first. Then, for the chain of blocks that
//! end at the current time (a leaf and possibly some ancestors) and for the
//! parent of the topmost one, the topwing of every region aligned with the
//! finished child is projected onto the current row. After the last access
//! the topwing of the whole square is projected as well.

use std::collections::BTreeSet;

use crate::decomposition::DecompositionTree;
use crate::error::{invalid, Result};
use crate::geometry::Point;
use crate::greedy::{greedy_cost, ExecutionTrace, NONE};
use crate::sequence::AccessSequence;

/// Rectangular region `[c1, c2] x [b1, t]` whose top row is the current row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub c1: usize,
    pub c2: usize,
    pub b1: i64,
}

struct Run {
    /// last touch strictly before the current row
    last: Vec<i64>,
    on_row: Vec<bool>,
    row: Vec<usize>,
    t: i64,
}

impl Run {
    fn eff(&self, c: usize) -> i64 {
        if self.on_row[c] {
            self.t
        } else {
            self.last[c]
        }
    }

    fn touch(&mut self, c: usize) {
        if !self.on_row[c] {
            self.on_row[c] = true;
            self.row.push(c);
        }
    }

    /// Topwing of `r` at this instant: the last touch `q` of a column is in it
    /// when it sits in a boundary column, or when the rectangle spanned by `q`
    /// and the top-left (top-right) corner holds nothing else.
    fn topwing(&self, r: Region) -> Vec<usize> {
        let Region { c1, c2, b1 } = r;
        let mut member = vec![false; c2 + 1 - c1];
        let mut m = self.last[c1];
        for c in c1..=c2 {
            let e = self.eff(c);
            if e != NONE && e >= b1 && (c == c1 || c == c2 || m < e) {
                member[c - c1] = true;
            }
            if c > c1 {
                m = m.max(e);
            }
        }
        let mut m = self.last[c2];
        for c in (c1..=c2).rev() {
            let e = self.eff(c);
            if e != NONE && e >= b1 && m < e {
                member[c - c1] = true;
            }
            if c < c2 {
                m = m.max(e);
            }
        }
        (c1..=c2).filter(|&c| member[c - c1]).collect()
    }

    fn project(&mut self, r: Region) {
        for c in self.topwing(r) {
            self.touch(c);
        }
    }

    /// Project all regions aligned with child `j` of internal node `v`.
    fn project_row_of(&mut self, tree: &DecompositionTree, v: usize, j: usize) {
        let node = tree.node(v);
        let child = tree.node(node.children()[j]);
        let b1 = child.block.a as i64;
        for &ci in node.children() {
            let kb = tree.node(ci).block;
            self.project(Region { c1: kb.c, c2: kb.d, b1 });
        }
    }
}

/// Topwing of `r` given the finished rows `history` (times `1..`) and the
/// columns already touched on the current row.
pub fn topwing(n: usize, history: &[Vec<usize>], current: &[usize], r: Region) -> Vec<Point> {
    let mut run = Run {
        last: vec![NONE; n + 2],
        on_row: vec![false; n + 2],
        row: Vec::new(),
        t: history.len() as i64 + 1,
    };
    for (i, row) in history.iter().enumerate() {
        for &c in row {
            run.last[c] = i as i64 + 1;
        }
    }
    for &c in current {
        run.touch(c);
    }
    run.topwing(r).into_iter().map(|c| Point::new(c, run.eff(c))).collect()
}

#[derive(Clone, Debug)]
pub struct RGreedyRun {
    pub trace: ExecutionTrace,
    /// For each internal node, the `k x k` indicator of touched regions
    /// `[i][j]` (skeleton value `i+1`, child `j`) taken just before the node's
    /// own topwing is projected. Only filled when instrumented.
    pub region_snapshots: Vec<(usize, Vec<Vec<bool>>)>,
}

pub fn run_rgreedy(x: &AccessSequence, tree: &DecompositionTree) -> Result<ExecutionTrace> {
    Ok(run_rgreedy_inner(x, tree, false)?.trace)
}

pub fn run_rgreedy_instrumented(x: &AccessSequence, tree: &DecompositionTree) -> Result<RGreedyRun> {
    run_rgreedy_inner(x, tree, true)
}

fn run_rgreedy_inner(x: &AccessSequence, tree: &DecompositionTree, instrument: bool) -> Result<RGreedyRun> {
    if !x.is_permutation() {
        return invalid("RGreedy runs on permutations");
    }
    if tree.n() != x.n() {
        return invalid(format!("tree has size {}, sequence {}", tree.n(), x.n()));
    }
    tree.check_matches(x.keys())?;
    let n = x.n();
    let m = x.m();
    let mut leaf_at = vec![0usize; m + 1];
    for id in tree.leaves() {
        let b = tree.node(id).block;
        for t in b.a..=b.b {
            leaf_at[t] = id;
        }
    }
    let mut index_in_parent = vec![0usize; tree.nodes().len()];
    for id in tree.internals() {
        for (j, &c) in tree.node(id).children().iter().enumerate() {
            index_in_parent[c] = j;
        }
    }
    let mut run = Run {
        last: vec![NONE; n + 2],
        on_row: vec![false; n + 2],
        row: Vec::new(),
        t: 0,
    };
    let mut live: BTreeSet<usize> = BTreeSet::new();
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(m);
    let mut snapshots = Vec::new();
    for t in 1..=m {
        run.t = t as i64;
        let a = x.at(t);
        run.touch(a);
        // Greedy step on the history before this row
        let mut stair = Vec::new();
        let mut mx = run.last[a];
        for &b in live.range(a + 1..) {
            if mx >= run.t - 1 {
                break;
            }
            if run.last[b] > mx {
                mx = run.last[b];
                stair.push(b);
            }
        }
        let mut mx = run.last[a];
        for &b in live.range(..a).rev() {
            if mx >= run.t - 1 {
                break;
            }
            if run.last[b] > mx {
                mx = run.last[b];
                stair.push(b);
            }
        }
        for b in stair {
            run.touch(b);
        }
        // v_1..v_l: blocks ending now, smallest first
        let mut chain = Vec::new();
        let leaf = leaf_at[t];
        if tree.node(leaf).block.b == t {
            chain.push(leaf);
            while let Some(p) = tree.node(*chain.last().unwrap()).parent {
                if tree.node(p).block.b != t {
                    break;
                }
                chain.push(p);
            }
        }
        for h in 1..=chain.len() {
            let child = chain[h - 1];
            let Some(v) = tree.node(child).parent else { break };
            run.project_row_of(tree, v, index_in_parent[child]);
            if instrument && h < chain.len() {
                snapshots.push((v, region_matrix(tree, v, &rows, &run)));
            }
        }
        if t == m {
            if instrument && !tree.node(tree.root()).is_leaf() {
                snapshots.push((tree.root(), region_matrix(tree, tree.root(), &rows, &run)));
            }
            run.project(Region { c1: 1, c2: n, b1: 1 });
        }
        let mut row = std::mem::take(&mut run.row);
        for &c in &row {
            run.on_row[c] = false;
            run.last[c] = run.t;
            live.insert(c);
        }
        row.sort_unstable();
        rows.push(row);
    }
    Ok(RGreedyRun {
        trace: ExecutionTrace {
            alg: "rgreedy".into(),
            input: x.clone(),
            initial: None,
            rows,
        },
        region_snapshots: snapshots,
    })
}

fn region_matrix(tree: &DecompositionTree, v: usize, rows: &[Vec<usize>], run: &Run) -> Vec<Vec<bool>> {
    let node = tree.node(v);
    let kids = node.children();
    let sk = node.skeleton().expect("internal node");
    let k = kids.len();
    let bl = node.block;
    let mut key_cls = vec![usize::MAX; bl.d + 1];
    let mut time_cls = vec![usize::MAX; bl.b + 1];
    for (j, &c) in kids.iter().enumerate() {
        let cb = tree.node(c).block;
        for key in cb.c..=cb.d {
            key_cls[key] = sk[j] - 1;
        }
        for s in cb.a..=cb.b {
            time_cls[s] = j;
        }
    }
    let mut out = vec![vec![false; k]; k];
    for s in bl.a..=bl.b {
        let cols: Vec<usize> = if s as i64 == run.t { run.row.clone() } else { rows[s - 1].clone() };
        for c in cols {
            if (bl.c..=bl.d).contains(&c) {
                out[key_cls[c]][time_cls[s]] = true;
            }
        }
    }
    out
}

/// Greedy's touch indicator on a permutation from empty history,
/// `[key-1][time-1]`.
pub fn greedy_indicator(p: &[usize]) -> Vec<Vec<bool>> {
    let x = AccessSequence::from_perm(p.to_vec()).expect("permutation");
    let tr = crate::greedy::run_greedy(&x, None).expect("no tree");
    let k = p.len();
    let mut out = vec![vec![false; k]; k];
    for (t, row) in tr.rows.iter().enumerate() {
        for &c in row {
            out[c - 1][t] = true;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecompositionBound {
    pub lhs: usize,
    pub rhs: usize,
    pub skeleton_greedy: usize,
    pub leaf_greedy: usize,
}

impl DecompositionBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// RGreedy cost against `4 * sum Greedy(skeleton) + sum Greedy(leaf) + 3n`.
pub fn decomposition_bound(x: &AccessSequence, tree: &DecompositionTree) -> Result<(DecompositionBound, ExecutionTrace)> {
    let trace = run_rgreedy(x, tree)?;
    let skeleton_greedy: usize = tree.internals().map(|id| greedy_cost(tree.node(id).pattern())).sum();
    let leaf_greedy: usize = tree.leaves().map(|id| greedy_cost(tree.node(id).pattern())).sum();
    let b = DecompositionBound {
        lhs: trace.cost(),
        rhs: 4 * skeleton_greedy + leaf_greedy + 3 * x.n(),
        skeleton_greedy,
        leaf_greedy,
    };
    Ok((b, trace))
}
