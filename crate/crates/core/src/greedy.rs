//! Online geometric Greedy and its one-sided variants.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointGrid};
use crate::perm::parse_list;
use crate::sequence::AccessSequence;
use crate::tree::{initial_spec_string, parse_initial_spec, InitialTree};

pub(crate) const NONE: i64 = i64::MIN;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Both,
    Left,
    Right,
}

/// Per-column last-touch times for a running execution.
#[derive(Clone, Debug)]
pub struct TauState {
    tau: Vec<i64>,
    // columns holding at least one point, so scans skip untouched keys
    live: BTreeSet<usize>,
}

impl TauState {
    pub fn new(n: usize, initial: Option<&InitialTree>) -> Self {
        let mut tau = vec![NONE; n + 2];
        let mut live = BTreeSet::new();
        if let Some(t) = initial {
            live.extend(1..=n);
            let d = t.depth() as i64;
            for x in 1..=n {
                tau[x] = 1 - t.depth_of(x) as i64;
                debug_assert!(tau[x] >= 1 - d);
            }
        }
        TauState { tau, live }
    }

    pub fn tau(&self, b: usize) -> Option<i64> {
        let v = self.tau[b];
        (v != NONE).then_some(v)
    }

    pub fn set(&mut self, b: usize, t: i64) {
        self.tau[b] = t;
        self.live.insert(b);
    }

    /// Keys `b > a` whose rectangle with `(a, t)` is empty, in increasing order.
    pub fn stair_right(&self, a: usize, t: i64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut m = self.tau[a];
        for &b in self.live.range(a + 1..) {
            if m >= t - 1 {
                break;
            }
            let tb = self.tau[b];
            if tb > m {
                out.push(b);
                m = tb;
            }
        }
        out
    }

    /// Keys `b < a` whose rectangle with `(a, t)` is empty, in decreasing order.
    pub fn stair_left(&self, a: usize, t: i64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut m = self.tau[a];
        for &b in self.live.range(..a).rev() {
            if m >= t - 1 {
                break;
            }
            let tb = self.tau[b];
            if tb > m {
                out.push(b);
                m = tb;
            }
        }
        out
    }

    /// The accessed key together with the requested sides of its stair, sorted.
    pub fn touch_set(&self, a: usize, t: i64, side: Side) -> Vec<usize> {
        let mut row = Vec::new();
        if side != Side::Right {
            let mut l = self.stair_left(a, t);
            l.reverse();
            row.extend(l);
        }
        row.push(a);
        if side != Side::Left {
            row.extend(self.stair_right(a, t));
        }
        row
    }
}

/// Full stair of `a` at time `t`, including `a` itself.
pub fn stair(state: &TauState, a: usize, t: i64) -> Vec<usize> {
    state.touch_set(a, t, Side::Both)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub alg: String,
    pub input: AccessSequence,
    pub initial: Option<InitialTree>,
    /// Sorted touched columns for times `1..=m`.
    pub rows: Vec<Vec<usize>>,
}

impl ExecutionTrace {
    pub fn n(&self) -> usize {
        self.input.n()
    }

    /// Touch points on rows `1..=m`; initial stacks are not counted.
    pub fn cost(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn touch_grid(&self) -> PointGrid {
        let mut g = PointGrid::new(self.n());
        for (i, row) in self.rows.iter().enumerate() {
            for &x in row {
                g.insert(Point::new(x, i as i64 + 1));
            }
        }
        g
    }

    /// Touch grid stacked on top of the initial-tree encoding.
    pub fn combined_grid(&self) -> PointGrid {
        let mut g = self.touch_grid();
        if let Some(t) = &self.initial {
            for p in t.encode().points() {
                g.insert(p);
            }
        }
        g
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# n={} m={} initial={} alg={}\n",
            self.n(),
            self.input.m(),
            initial_spec_string(self.initial.as_ref()),
            self.alg
        );
        for (i, row) in self.rows.iter().enumerate() {
            let cols: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "{} *{}: {}", i + 1, self.input.at(i + 1), cols.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .and_then(|h| h.strip_prefix('#'))
            .ok_or_else(|| Error::Parse("trace must start with a `#` header".into()))?;
        let mut n = None;
        let mut initial = "none".to_string();
        let mut alg = "greedy".to_string();
        for kv in header.split_whitespace() {
            match kv.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("initial", v)) => initial = v.to_string(),
                Some(("alg", v)) => alg = v.to_string(),
                _ => {}
            }
        }
        let n = n.ok_or_else(|| Error::Parse("trace header lacks n=".into()))?;
        let mut keys = Vec::new();
        let mut rows = Vec::new();
        for (i, l) in lines.enumerate() {
            let bad = || Error::Parse(format!("bad trace line {l:?}"));
            let (head, tail) = l.split_once(':').ok_or_else(bad)?;
            let mut head = head.split_whitespace();
            let t: usize = head.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let x: usize = head
                .next()
                .and_then(|v| v.strip_prefix('*'))
                .and_then(|v| v.parse().ok())
                .ok_or_else(bad)?;
            if t != i + 1 {
                return Err(Error::Parse(format!("expected time {}, got {t}", i + 1)));
            }
            let mut row = parse_list(tail)?;
            row.sort_unstable();
            row.dedup();
            if !row.contains(&x) || row.iter().any(|&c| c == 0 || c > n) {
                return Err(bad());
            }
            keys.push(x);
            rows.push(row);
        }
        let input = AccessSequence::new(n, keys)?;
        let initial = parse_initial_spec(&initial, n)?;
        Ok(ExecutionTrace { alg, input, initial, rows })
    }
}

#[derive(Serialize)]
struct TraceJsonOut<'a> {
    alg: &'a str,
    n: usize,
    m: usize,
    initial: String,
    cost: usize,
    rows: Vec<TraceRowJson<'a>>,
}

#[derive(Serialize)]
struct TraceRowJson<'a> {
    t: usize,
    access: usize,
    touched: &'a [usize],
}

impl ExecutionTrace {
    pub fn to_json(&self) -> serde_json::Value {
        let out = TraceJsonOut {
            alg: &self.alg,
            n: self.n(),
            m: self.input.m(),
            initial: initial_spec_string(self.initial.as_ref()),
            cost: self.cost(),
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| TraceRowJson { t: i + 1, access: self.input.at(i + 1), touched: r })
                .collect(),
        };
        serde_json::to_value(out).expect("trace serializes")
    }
}

fn check_tree(x: &AccessSequence, t: Option<&InitialTree>) -> Result<()> {
    match t {
        Some(t) if t.n() != x.n() => Err(Error::InvalidArgument(format!(
            "initial tree has {} keys, sequence universe is {}",
            t.n(),
            x.n()
        ))),
        _ => Ok(()),
    }
}

pub fn run_greedy_sided(x: &AccessSequence, t: Option<&InitialTree>, side: Side) -> Result<ExecutionTrace> {
    check_tree(x, t)?;
    let mut st = TauState::new(x.n(), t);
    let mut rows = Vec::with_capacity(x.m());
    for (i, &a) in x.keys().iter().enumerate() {
        let time = i as i64 + 1;
        let row = st.touch_set(a, time, side);
        for &b in &row {
            st.set(b, time);
        }
        rows.push(row);
    }
    let alg = match side {
        Side::Both => "greedy",
        Side::Left => "greedy-left",
        Side::Right => "greedy-right",
    };
    Ok(ExecutionTrace {
        alg: alg.to_string(),
        input: x.clone(),
        initial: t.cloned(),
        rows,
    })
}

pub fn run_greedy(x: &AccessSequence, t: Option<&InitialTree>) -> Result<ExecutionTrace> {
    run_greedy_sided(x, t, Side::Both)
}

/// Greedy cost of a permutation from empty history.
pub fn greedy_cost(p: &[usize]) -> usize {
    let x = AccessSequence::new(p.len(), p.to_vec()).expect("valid keys");
    run_greedy(&x, None).expect("no tree").cost()
}

#[derive(Clone, Debug)]
pub struct SGreedyResult {
    pub left: ExecutionTrace,
    pub right: ExecutionTrace,
    pub cost: usize,
}

impl SGreedyResult {
    pub fn union_grid(&self) -> PointGrid {
        self.left.touch_grid().union(&self.right.touch_grid())
    }
}

pub fn run_sgreedy(x: &AccessSequence, t: Option<&InitialTree>) -> Result<SGreedyResult> {
    let left = run_greedy_sided(x, t, Side::Left)?;
    let right = run_greedy_sided(x, t, Side::Right)?;
    let cost = left
        .rows
        .iter()
        .zip(&right.rows)
        .map(|(l, r)| {
            let mut u: Vec<usize> = l.iter().chain(r).copied().collect();
            u.sort_unstable();
            u.dedup();
            u.len()
        })
        .sum();
    Ok(SGreedyResult { left, right, cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::is_satisfied_set;

    fn seq(k: &[usize]) -> AccessSequence {
        AccessSequence::new(k.len(), k.to_vec()).unwrap()
    }

    #[test]
    fn hand_simulations() {
        let tr = run_greedy(&seq(&[1, 2, 3]), None).unwrap();
        assert_eq!(tr.rows, vec![vec![1], vec![1, 2], vec![2, 3]]);
        assert_eq!(tr.cost(), 5);
        assert_eq!(run_greedy(&seq(&[2, 1]), None).unwrap().cost(), 3);
        assert_eq!(run_greedy_sided(&seq(&[1, 2]), None, Side::Right).unwrap().cost(), 2);
        assert_eq!(run_greedy_sided(&seq(&[1, 2]), None, Side::Left).unwrap().cost(), 3);
        assert_eq!(run_sgreedy(&seq(&[1, 2]), None).unwrap().cost, 3);
    }

    #[test]
    fn stair_examples() {
        let mut st = TauState::new(3, None);
        assert_eq!(stair(&st, 2, 1), vec![2]);
        st.set(1, 1);
        assert_eq!(stair(&st, 2, 2), vec![1, 2]);
        st.set(2, 2);
        assert_eq!(stair(&st, 3, 3), vec![2, 3]);
    }

    #[test]
    fn initial_tree_stair_is_search_path() {
        let t = InitialTree::balanced(3).unwrap();
        let st = TauState::new(3, Some(&t));
        assert_eq!(stair(&st, 1, 1), vec![1, 2]);
        assert_eq!(stair(&st, 1, 1), t.path(1));
    }

    #[test]
    fn sequential_closed_form() {
        for n in 1..=40 {
            let x = seq(&(1..=n).collect::<Vec<_>>());
            let tr = run_greedy(&x, None).unwrap();
            assert_eq!(tr.cost(), 2 * n - 1);
            assert!(is_satisfied_set(&tr.combined_grid()));
            assert_eq!(run_sgreedy(&x, None).unwrap().cost, 2 * n - 1);
        }
    }

    #[test]
    fn trace_text_round_trip() {
        let t = InitialTree::balanced(4).unwrap();
        let tr = run_greedy(&seq(&[3, 1, 4, 2]), Some(&t)).unwrap();
        let back = ExecutionTrace::from_text(&tr.to_text()).unwrap();
        assert_eq!(back, tr);
        assert!(tr.to_text().starts_with("# n=4 m=4 initial=preorder:"));
    }
}
