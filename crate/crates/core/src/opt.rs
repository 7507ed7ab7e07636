//! Exact OPT for tiny inputs, the block lower bound, and the split/merge
//! transforms for sequences with repeated keys.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::decomposition::DecompositionTree;
use crate::error::{invalid, Error, Result};
use crate::generators::rng;
use crate::geometry::{is_satisfied_set, Point, PointGrid};
use crate::greedy::{run_greedy, run_sgreedy};
use crate::perm::{all_permutations, check_permutation};
use crate::sequence::AccessSequence;

#[derive(Clone, Debug)]
pub struct OptLimits {
    pub max_n: usize,
    pub node_cap: u64,
    pub time_cap: Option<Duration>,
    /// 1 searches the input grid only. 2 also offers every half-integer
    /// column and row, including one past each end.
    pub scale: usize,
}

impl Default for OptLimits {
    fn default() -> Self {
        OptLimits { max_n: 8, node_cap: 10_000_000, time_cap: None, scale: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct OptResult {
    pub cost: usize,
    /// In scaled coordinates when `scale > 1`.
    pub witness: PointGrid,
    pub nodes: u64,
    /// Number of points added over the input.
    pub depth: usize,
    pub exact: bool,
}

impl OptResult {
    pub fn to_json(&self) -> serde_json::Value {
        let points: Vec<(usize, i64)> = self.witness.points().map(|p| (p.x, p.y)).collect();
        serde_json::json!({
            "cost": self.cost,
            "points": points,
            "nodes": self.nodes,
            "exact": self.exact,
        })
    }
}

/// Dense bit grid: `rows[r]` bit `c` is the point `(c + 1, r + 1)`.
struct Search {
    w: usize,
    h: usize,
    rows: Vec<u64>,
    forbid: Vec<u64>,
    nodes: u64,
    node_cap: u64,
    deadline: Option<Instant>,
    stopped: Option<&'static str>,
}

#[derive(Clone, Copy)]
struct Rect {
    x1: usize,
    x2: usize,
    y1: usize,
    y2: usize,
}

impl Rect {
    fn col_mask(&self) -> u64 {
        let hi = if self.x2 == 63 { u64::MAX } else { (1u64 << (self.x2 + 1)) - 1 };
        hi & !((1u64 << self.x1) - 1)
    }
}

impl Search {
    fn highest_below(&self, c: usize, r: usize) -> Option<usize> {
        (0..r).rev().find(|&rr| self.rows[rr] >> c & 1 == 1)
    }

    fn empty(&self, r: &Rect) -> bool {
        let m = r.col_mask();
        let mut cnt = 0;
        for y in r.y1..=r.y2 {
            cnt += (self.rows[y] & m).count_ones();
            if cnt > 2 {
                return false;
            }
        }
        true
    }

    /// Unsatisfied pairs ordered by upper corner (row, column), then lower.
    fn unsatisfied(&self, first_only: bool) -> Vec<Rect> {
        let mut out = Vec::new();
        for y in 0..self.h {
            let mut bits = self.rows[y];
            while bits != 0 {
                let x = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let mut cands: Vec<(usize, usize)> = Vec::new();
                for b in 0..self.w {
                    if b == x {
                        continue;
                    }
                    let Some(py) = self.highest_below(b, y) else { continue };
                    let r = Rect { x1: b.min(x), x2: b.max(x), y1: py, y2: y };
                    if self.empty(&r) {
                        cands.push((py, b));
                    }
                }
                cands.sort_unstable();
                for (py, b) in cands {
                    out.push(Rect { x1: b.min(x), x2: b.max(x), y1: py, y2: y });
                    if first_only {
                        return out;
                    }
                }
            }
        }
        out
    }

    fn free_cells(&self, r: &Rect) -> Vec<u64> {
        let m = r.col_mask();
        (r.y1..=r.y2).map(|y| m & !self.rows[y] & !self.forbid[y]).collect()
    }

    /// Packing bound: pairwise disjoint candidate sets each need their own
    /// point. `None` when some pair has no candidate left.
    fn lower_bound(&self, rects: &[Rect]) -> Option<usize> {
        let mut used = vec![0u64; self.h];
        let mut lb = 0;
        for r in rects {
            let cells = self.free_cells(r);
            if cells.iter().all(|&c| c == 0) {
                return None;
            }
            if cells.iter().zip(r.y1..).all(|(&c, y)| c & used[y] == 0) {
                for (&c, y) in cells.iter().zip(r.y1..) {
                    used[y] |= c;
                }
                lb += 1;
            }
        }
        Some(lb)
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            self.stopped = Some("node cap");
        } else if let Some(d) = self.deadline {
            if self.nodes.is_multiple_of(1024) && Instant::now() > d {
                self.stopped = Some("time cap");
            }
        }
        self.stopped.is_some()
    }

    fn dfs(&mut self, budget: usize) -> bool {
        if self.tick() {
            return false;
        }
        let rects = self.unsatisfied(false);
        let Some(&first) = rects.first() else { return true };
        match self.lower_bound(&rects) {
            Some(lb) if lb <= budget => {}
            _ => return false,
        }
        let cells = self.free_cells(&first);
        let mut banned = Vec::new();
        let mut found = false;
        'outer: for (i, mut bits) in cells.into_iter().enumerate() {
            let y = first.y1 + i;
            while bits != 0 {
                let c = bits & bits.wrapping_neg();
                bits &= bits - 1;
                self.rows[y] |= c;
                let ok = self.dfs(budget - 1);
                if ok {
                    found = true;
                    break 'outer;
                }
                self.rows[y] &= !c;
                if self.stopped.is_some() {
                    break 'outer;
                }
                self.forbid[y] |= c;
                banned.push((y, c));
            }
        }
        for (y, c) in banned {
            self.forbid[y] &= !c;
        }
        found
    }

    fn grid(&self, width: usize) -> PointGrid {
        let mut g = PointGrid::new(width);
        for (y, &bits) in self.rows.iter().enumerate() {
            let mut b = bits;
            while b != 0 {
                let x = b.trailing_zeros() as usize;
                b &= b - 1;
                g.insert(Point::new(x + 1, y as i64 + 1));
            }
        }
        g
    }
}

/// Minimal satisfied superset, or the Greedy witness flagged inexact when a
/// cap stops the search.
pub fn search_opt(x: &AccessSequence, limits: &OptLimits) -> Result<OptResult> {
    let n = x.n();
    let m = x.m();
    if n > limits.max_n {
        return invalid(format!("n = {n} exceeds the OPT search limit {}", limits.max_n));
    }
    if limits.scale == 0 || limits.scale > 2 {
        return invalid("scale must be 1 or 2");
    }
    let s = limits.scale;
    let (w, h) = if s == 1 { (n, m) } else { (2 * n + 1, 2 * m + 1) };
    if w > 64 || h > 64 {
        return invalid("OPT search grid is limited to 64 columns and 64 rows");
    }
    let ub_trace = run_greedy(x, None)?;
    let ub = ub_trace.cost();
    let ub_grid = PointGrid::from_points(
        w,
        ub_trace.touch_grid().points().map(|p| Point::new(p.x * s, p.y * s as i64)),
    );
    let mut search = Search {
        w,
        h,
        rows: vec![0; h],
        forbid: vec![0; h],
        nodes: 0,
        node_cap: limits.node_cap,
        deadline: limits.time_cap.map(|d| Instant::now() + d),
        stopped: None,
    };
    for (t, &k) in x.keys().iter().enumerate() {
        search.rows[(t + 1) * s - 1] |= 1u64 << (k * s - 1);
    }
    let rects = search.unsatisfied(false);
    let lb0 = search.lower_bound(&rects).unwrap_or(0);
    for d in lb0..ub - m {
        if search.dfs(d) {
            return Ok(OptResult { cost: m + d, witness: search.grid(w), nodes: search.nodes, depth: d, exact: true });
        }
        if search.stopped.is_some() {
            return Ok(OptResult { cost: ub, witness: ub_grid, nodes: search.nodes, depth: ub - m, exact: false });
        }
    }
    Ok(OptResult { cost: ub, witness: ub_grid, nodes: search.nodes, depth: ub - m, exact: true })
}

/// Like `search_opt` but a cap is an error carrying the Greedy upper bound.
pub fn brute_force_opt(x: &AccessSequence, limits: &OptLimits) -> Result<OptResult> {
    let r = search_opt(x, limits)?;
    if !r.exact {
        return Err(Error::ResourceLimit {
            what: format!("OPT search stopped after {} nodes", r.nodes),
            upper_bound: Some(r.cost),
        });
    }
    Ok(r)
}

pub fn opt_cost(p: &[usize], limits: &OptLimits) -> Result<usize> {
    check_permutation(p)?;
    let x = AccessSequence::from_perm(p.to_vec())?;
    Ok(brute_force_opt(&x, limits)?.cost)
}

/// `(OPT(X), sum of OPT over every node pattern - 2n)`.
pub fn decomposition_lower_bound_check(
    x: &[usize],
    tree: &DecompositionTree,
    limits: &OptLimits,
) -> Result<(usize, i64)> {
    tree.check_matches(x)?;
    let whole = opt_cost(x, limits)?;
    let mut memo: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut sum = 0usize;
    for node in tree.nodes() {
        let pat = node.pattern().to_vec();
        let c = match memo.get(&pat) {
            Some(&c) => c,
            None => {
                let c = opt_cost(&pat, limits)?;
                memo.insert(pat, c);
                c
            }
        };
        sum += c;
    }
    Ok((whole, sum as i64 - 2 * x.len() as i64))
}

/// Realizes each repeat access in its own column just right of its key's
/// first column. Returns the permutation and, per new column, its key.
pub fn split_sequence(x: &AccessSequence) -> (AccessSequence, Vec<usize>) {
    let n = x.n();
    let mut count = vec![0usize; n + 1];
    for &k in x.keys() {
        count[k] += 1;
    }
    let mut base = vec![0usize; n + 1];
    let mut map = Vec::with_capacity(x.m());
    for k in 1..=n {
        base[k] = map.len() + 1;
        map.extend(std::iter::repeat_n(k, count[k]));
    }
    let mut seen = vec![0usize; n + 1];
    let keys: Vec<usize> = x
        .keys()
        .iter()
        .map(|&k| {
            let c = base[k] + seen[k];
            seen[k] += 1;
            c
        })
        .collect();
    let p = AccessSequence::new(map.len(), keys).expect("columns in range");
    (p, map)
}

/// Collapses column `c` onto `map[c - 1]`.
pub fn merge_grid(s: &PointGrid, map: &[usize]) -> Result<PointGrid> {
    if s.width() > map.len() {
        return invalid(format!("column map covers {} columns, grid has {}", map.len(), s.width()));
    }
    let w = map.iter().copied().max().unwrap_or(0);
    let mut out = PointGrid::new(w);
    for p in s.points() {
        out.insert(Point::new(map[p.x - 1], p.y));
    }
    Ok(out)
}

/// Inverse of `split_sequence` over a key universe of size `n`.
pub fn merge_sequence(p: &AccessSequence, map: &[usize], n: usize) -> Result<AccessSequence> {
    if p.n() > map.len() {
        return invalid("column map does not cover the sequence");
    }
    AccessSequence::new(n, p.keys().iter().map(|&c| map[c - 1]).collect())
}

#[derive(Clone, Debug)]
pub struct SplitConstruction {
    pub grid: PointGrid,
    /// Key of each column of `grid`.
    pub column_map: Vec<usize>,
    /// The accesses of `split(X)` in `grid` coordinates.
    pub accesses: Vec<Point>,
}

/// Turns a satisfied superset `y` of `x` into a satisfied superset of the
/// split sequence. A key accessed `k >= 2` times gets `k` columns: the outer
/// two copy the whole original column, column `j` in between holds the rows
/// of accesses `j` and `j + 1`.
pub fn split_satisfied_construction(x: &AccessSequence, y: &PointGrid) -> Result<SplitConstruction> {
    for (t, &k) in x.keys().iter().enumerate() {
        if !y.contains(&Point::new(k, t as i64 + 1)) {
            return invalid(format!("superset misses access ({k}, {})", t + 1));
        }
    }
    if !is_satisfied_set(y) {
        return invalid("superset is not satisfied");
    }
    let n = x.n().max(y.width());
    let mut acc_rows: Vec<Vec<i64>> = vec![Vec::new(); n + 1];
    for (t, &k) in x.keys().iter().enumerate() {
        acc_rows[k].push(t as i64 + 1);
    }
    let mut grid = PointGrid::new(0);
    let mut column_map = Vec::new();
    let mut accesses = Vec::new();
    for k in 1..=n {
        let col: Vec<i64> = y.column(k).collect();
        let acc = &acc_rows[k];
        if acc.is_empty() && col.is_empty() {
            continue;
        }
        let start = column_map.len() + 1;
        if acc.len() <= 1 {
            column_map.push(k);
            for &r in &col {
                grid.insert(Point::new(start, r));
            }
        } else {
            let mk = acc.len();
            for j in 0..mk {
                column_map.push(k);
                let c = start + j;
                if j == 0 || j == mk - 1 {
                    for &r in &col {
                        grid.insert(Point::new(c, r));
                    }
                } else {
                    grid.insert(Point::new(c, acc[j]));
                    grid.insert(Point::new(c, acc[j + 1]));
                }
            }
        }
        for (j, &r) in acc.iter().enumerate() {
            accesses.push(Point::new(start + j, r));
        }
    }
    accesses.sort_by_key(|p| p.y);
    Ok(SplitConstruction { grid, column_map, accesses })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HardnessMode {
    /// Exact OPT on sampled or exhaustive permutations.
    Opt,
    /// SGreedy union cost divided by `n log2 n`.
    SGreedyRatio,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardnessSummary {
    pub n: usize,
    pub mode: HardnessMode,
    pub samples: usize,
    pub exhaustive: bool,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
    /// Half-width of the normal 95% interval for the mean.
    pub ci95: f64,
    /// OPT value -> count, exact mode only.
    pub histogram: BTreeMap<usize, usize>,
}

/// Exact OPT distribution for `n <= 6`, SGreedy ratios above that.
pub fn hardness_survey(n: usize, samples: usize, seed: u64, limits: &OptLimits) -> Result<HardnessSummary> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let mode = if n <= 6 { HardnessMode::Opt } else { HardnessMode::SGreedyRatio };
    let mut r = rng(seed);
    let factorial = (1..=n).try_fold(1usize, |a, b| a.checked_mul(b)).unwrap_or(usize::MAX);
    let exhaustive = mode == HardnessMode::Opt && (samples == 0 || factorial <= samples);
    let perms: Vec<Vec<usize>> = if exhaustive {
        all_permutations(n)
    } else {
        (0..samples.max(1))
            .map(|_| {
                let mut p: Vec<usize> = (1..=n).collect();
                p.shuffle(&mut r);
                p
            })
            .collect()
    };
    let mut values = Vec::with_capacity(perms.len());
    let mut histogram = BTreeMap::new();
    let nlogn = n as f64 * (n as f64).log2();
    for p in perms {
        match mode {
            HardnessMode::Opt => {
                let c = opt_cost(&p, &OptLimits { max_n: n.max(limits.max_n), ..limits.clone() })?;
                *histogram.entry(c).or_insert(0) += 1;
                values.push(c as f64);
            }
            HardnessMode::SGreedyRatio => {
                let x = AccessSequence::from_perm(p)?;
                values.push(run_sgreedy(&x, None)?.cost as f64 / nlogn);
            }
        }
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    let stddev = var.sqrt();
    Ok(HardnessSummary {
        n,
        mode,
        samples: values.len(),
        exhaustive,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        stddev,
        ci95: 1.96 * stddev / k.sqrt(),
        histogram,
    })
}
