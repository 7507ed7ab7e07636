//! Runtime checks for hiding behaviour and the wing accounting on preorders.

use crate::greedy::{ExecutionTrace, Side};

/// Hiding rules by algorithm. Each rule names the neighbours it needs and the
/// key range whose first access ends the quiet period.
#[derive(Clone, Copy, Debug)]
enum Rule {
    /// `w < x` with `tau(w) >= tau(x)`; quiet until an access in `(w, n]`.
    AfterW,
    /// `y > x`; quiet until an access in `[1, y)`.
    BeforeY,
    /// both; quiet until an access in `(w, y)`.
    Between,
    /// `w < x`; quiet until an access in `(w, x]`.
    RightSided,
    /// `y > x`; quiet until an access in `[x, y)`.
    LeftSided,
}

fn rules(side: Side) -> &'static [Rule] {
    match side {
        Side::Both => &[Rule::AfterW, Rule::BeforeY, Rule::Between],
        Side::Right => &[Rule::RightSided],
        Side::Left => &[Rule::LeftSided],
    }
}

/// Returns a description of the first violation of the hiding rules, scanning
/// every time `t` from 0 (the initial state) to `m`.
pub fn check_hidden(trace: &ExecutionTrace, side: Side) -> Result<(), String> {
    let n = trace.n();
    let m = trace.input.m();
    let keys = trace.input.keys();
    let mut touched = vec![vec![false; n + 1]; m + 1];
    for (i, row) in trace.rows.iter().enumerate() {
        for &b in row {
            touched[i + 1][b] = true;
        }
    }
    let mut tau: Vec<Option<i64>> = vec![None; n + 1];
    if let Some(t) = &trace.initial {
        for (x, slot) in tau.iter_mut().enumerate().skip(1) {
            *slot = Some(1 - t.depth_of(x) as i64);
        }
    }
    for t in 0..=m {
        if t > 0 {
            for b in 1..=n {
                if touched[t][b] {
                    tau[b] = Some(t as i64);
                }
            }
        }
        for x in 1..=n {
            let w = (1..x).rev().find(|&w| tau[w] >= tau[x]);
            let y = (x + 1..=n).find(|&y| tau[y] >= tau[x]);
            for &rule in rules(side) {
                let range = match (rule, w, y) {
                    (Rule::AfterW, Some(w), _) => (w + 1, n),
                    (Rule::BeforeY, _, Some(y)) => (1, y - 1),
                    (Rule::Between, Some(w), Some(y)) => (w + 1, y - 1),
                    (Rule::RightSided, Some(w), _) => (w + 1, x),
                    (Rule::LeftSided, _, Some(y)) => (x, y - 1),
                    _ => continue,
                };
                let end = (t + 1..=m)
                    .find(|&s| (range.0..=range.1).contains(&keys[s - 1]))
                    .unwrap_or(m + 1);
                if let Some(s) = (t + 1..end).find(|&s| touched[s][x]) {
                    return Err(format!(
                        "{rule:?}: key {x} hidden in [{}, {}] after t={t} but touched at t={s}",
                        range.0, range.1
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Left and right wings of every key of a preorder sequence (index = key).
pub fn wings(x: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = x.len();
    let empty_rect = |i: usize, j: usize| {
        let (lo_t, hi_t) = (i.min(j), i.max(j));
        let (lo_x, hi_x) = (x[i].min(x[j]), x[i].max(x[j]));
        (lo_t + 1..hi_t).all(|s| !(lo_x..=hi_x).contains(&x[s]))
    };
    let mut out = vec![(Vec::new(), Vec::new()); n + 1];
    for (i, &a) in x.iter().enumerate() {
        let mut j = i + 1;
        let mut l = Vec::new();
        while j < n && x[j] < a {
            l.push(j);
            j += 1;
        }
        let r_a = x[..i].iter().copied().filter(|&v| v > a).min().unwrap_or(usize::MAX);
        let mut r = Vec::new();
        while j < n && x[j] > a && x[j] < r_a {
            r.push(j);
            j += 1;
        }
        out[a].0 = l.into_iter().filter(|&j| empty_rect(i, j)).map(|j| x[j]).collect();
        out[a].1 = r.into_iter().filter(|&j| empty_rect(i, j)).map(|j| x[j]).collect();
    }
    out
}

/// Per-key touch counts stay within the wing budget and the wings total at
/// most `2n`.
pub fn check_wings(trace: &ExecutionTrace) -> Result<(), String> {
    let x = trace.input.keys();
    let n = x.len();
    let w = wings(x);
    let total: usize = w.iter().map(|(l, r)| l.len() + r.len()).sum();
    if total > 2 * n {
        return Err(format!("wings total {total} > 2n = {}", 2 * n));
    }
    let mut count = vec![0usize; n + 1];
    for row in &trace.rows {
        for &b in row {
            count[b] += 1;
        }
    }
    for a in 1..=n {
        let budget = w[a].0.len() + w[a].1.len() + 2;
        if count[a] > budget {
            return Err(format!("key {a} touched {} times, wing budget {budget}", count[a]));
        }
    }
    Ok(())
}
