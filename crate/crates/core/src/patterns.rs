//! 0/1 pattern matrices and order-preserving containment.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point, PointGrid};
use crate::perm::{all_permutations, check_permutation, parse_list};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Permutation,
    Light,
    General,
}

/// Ones are `(col, row)`, both 1-based, with row 1 at the bottom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternMatrix {
    pub cols: usize,
    pub rows: usize,
    ones: Vec<(usize, usize)>,
}

impl PatternMatrix {
    pub fn new(cols: usize, rows: usize, ones: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let set: BTreeSet<(usize, usize)> = ones.into_iter().collect();
        if set.iter().any(|&(c, r)| c == 0 || r == 0 || c > cols || r > rows) {
            return invalid("pattern one lies outside the matrix");
        }
        Ok(PatternMatrix { cols, rows, ones: set.into_iter().collect() })
    }

    /// `pi` as a matrix: row `i` holds its one in column `pi_i`.
    pub fn from_perm(pi: &[usize]) -> Result<Self> {
        check_permutation(pi)?;
        let k = pi.len();
        Self::new(k, k, pi.iter().enumerate().map(|(i, &v)| (v, i + 1)))
    }

    /// Sorted by column, then row.
    pub fn ones(&self) -> &[(usize, usize)] {
        &self.ones
    }

    pub fn kind(&self) -> Kind {
        let mut per_col = vec![0usize; self.cols + 1];
        let mut per_row = vec![0usize; self.rows + 1];
        for &(c, r) in &self.ones {
            per_col[c] += 1;
            per_row[r] += 1;
        }
        let light = per_col[1..].iter().all(|&v| v == 1);
        if light && self.cols == self.rows && per_row[1..].iter().all(|&v| v == 1) {
            Kind::Permutation
        } else if light {
            Kind::Light
        } else {
            Kind::General
        }
    }

    /// One-line form when this is a permutation matrix.
    pub fn as_perm(&self) -> Option<Vec<usize>> {
        if self.kind() != Kind::Permutation {
            return None;
        }
        let mut p = vec![0; self.rows];
        for &(c, r) in &self.ones {
            p[r - 1] = c;
        }
        Some(p)
    }

    /// Replaces every one of `self` by a copy of `g`.
    pub fn tensor(&self, g: &PatternMatrix) -> PatternMatrix {
        let mut ones = Vec::with_capacity(self.ones.len() * g.ones.len());
        for &(pc, pr) in &self.ones {
            for &(gc, gr) in &g.ones {
                ones.push(((pc - 1) * g.cols + gc, (pr - 1) * g.rows + gr));
            }
        }
        PatternMatrix::new(self.cols * g.cols, self.rows * g.rows, ones).expect("in range")
    }
}

impl std::fmt::Display for PatternMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in (1..=self.rows).rev() {
            let line: String = (1..=self.cols)
                .map(|c| if self.ones.binary_search(&(c, r)).is_ok() { '*' } else { '.' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

pub fn cap() -> PatternMatrix {
    PatternMatrix::new(3, 2, [(1, 1), (3, 1), (2, 2)]).expect("static")
}

/// `(k, k-1, ..., 1)`; the gadget for increasing inputs.
pub fn inc(k: usize) -> Vec<usize> {
    (1..=k).rev().collect()
}

/// `(1, 2, ..., k)`.
pub fn dec(k: usize) -> Vec<usize> {
    (1..=k).collect()
}

/// Starts at `(k+1)/2`, then alternates between the largest and the smallest
/// value not yet used.
pub fn alt(k: usize) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    let first = k.div_ceil(2);
    let mut rest: std::collections::VecDeque<usize> = (1..=k).filter(|&v| v != first).collect();
    let mut out = vec![first];
    let mut big = true;
    while !rest.is_empty() {
        let v = if big { rest.pop_back() } else { rest.pop_front() };
        out.extend(v);
        big = !big;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetName {
    Cap,
    Inc(usize),
    Dec(usize),
    Alt(usize),
}

impl GadgetName {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "cap" {
            return Ok(GadgetName::Cap);
        }
        let (name, k) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("unknown gadget {s:?}")))?;
        let k: usize = k
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad gadget size in {s:?}")))?;
        if k == 0 {
            return invalid("gadget size must be at least 1");
        }
        match name {
            "inc" => Ok(GadgetName::Inc(k)),
            "dec" => Ok(GadgetName::Dec(k)),
            "alt" => Ok(GadgetName::Alt(k)),
            _ => invalid(format!("unknown gadget {name:?}")),
        }
    }
}

pub fn gadget(name: GadgetName) -> PatternMatrix {
    let perm = match name {
        GadgetName::Cap => return cap(),
        GadgetName::Inc(k) => inc(k),
        GadgetName::Dec(k) => dec(k),
        GadgetName::Alt(k) => alt(k),
    };
    PatternMatrix::from_perm(&perm).expect("valid permutation")
}

/// Parses a comma list as a permutation pattern, or a gadget name.
pub fn parse_pattern(s: &str) -> Result<PatternMatrix> {
    if s.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        PatternMatrix::from_perm(&parse_list(s)?)
    } else {
        Ok(gadget(GadgetName::parse(s)?))
    }
}

/// Visits embeddings of `needle` into `hay`. The haystack is read as a matrix
/// whose columns are `1..=width` and whose rows span its lowest to highest
/// occupied row, so empty needle rows and columns need room in between.
pub struct Embedder<'a> {
    hay: &'a PointGrid,
    needle: &'a PatternMatrix,
    ymin: i64,
    ymax: i64,
    // needle columns that carry ones, with their rows
    cols: Vec<(usize, Vec<usize>)>,
    col_img: Vec<usize>,
    row_img: Vec<Option<i64>>,
    pub nodes: u64,
    pub node_cap: u64,
    prune: Option<&'a dyn Fn(&[Point]) -> bool>,
}

impl<'a> Embedder<'a> {
    pub fn new(hay: &'a PointGrid, needle: &'a PatternMatrix) -> Self {
        let mut cols: Vec<(usize, Vec<usize>)> = Vec::new();
        for &(c, r) in needle.ones() {
            match cols.last_mut() {
                Some((lc, rs)) if *lc == c => rs.push(r),
                _ => cols.push((c, vec![r])),
            }
        }
        Embedder {
            hay,
            needle,
            ymin: hay.min_row().unwrap_or(0),
            ymax: hay.max_row().unwrap_or(-1),
            col_img: vec![0; cols.len()],
            cols,
            row_img: vec![None; needle.rows + 1],
            nodes: 0,
            node_cap: u64::MAX,
            prune: None,
        }
    }

    /// Partial matches for which `prune` answers true are not extended.
    pub fn with_prune(mut self, prune: &'a dyn Fn(&[Point]) -> bool) -> Self {
        self.prune = Some(prune);
        self
    }

    fn pruned(&self, matched: &[Point]) -> bool {
        self.prune.is_some_and(|f| f(matched))
    }

    /// Calls `visit` with the matched points (in the needle's `ones()` order)
    /// for every embedding until it breaks. Errors when the node cap is hit.
    pub fn run<F>(&mut self, visit: &mut F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[Point]) -> ControlFlow<()>,
    {
        if self.cols.is_empty() {
            return Ok(visit(&[]));
        }
        let mut matched = Vec::with_capacity(self.needle.ones().len());
        self.col_step(0, &mut matched, visit)
    }

    fn bump(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(Error::ResourceLimit {
                what: format!("pattern search exceeded {} nodes", self.node_cap),
                upper_bound: None,
            });
        }
        Ok(())
    }

    fn col_step<F>(&mut self, ci: usize, matched: &mut Vec<Point>, visit: &mut F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[Point]) -> ControlFlow<()>,
    {
        if ci == self.cols.len() {
            return Ok(visit(matched));
        }
        let c = self.cols[ci].0;
        let lo = if ci == 0 { c } else { self.col_img[ci - 1] + (c - self.cols[ci - 1].0) };
        let tail = self.needle.cols - c;
        let w = self.hay.width();
        if w < tail || lo > w - tail {
            return Ok(ControlFlow::Continue(()));
        }
        for x in lo..=w - tail {
            if self.hay.column(x).next().is_none() {
                continue;
            }
            self.bump()?;
            self.col_img[ci] = x;
            if self.row_step(ci, 0, matched, visit)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Feasible image interval for needle row `r` given the rows fixed so far.
    fn row_window(&self, r: usize) -> (i64, i64) {
        let mut lo = self.ymin + (r as i64 - 1);
        let mut hi = self.ymax - (self.needle.rows - r) as i64;
        for r2 in (1..r).rev() {
            if let Some(y) = self.row_img[r2] {
                lo = lo.max(y + (r - r2) as i64);
                break;
            }
        }
        for r2 in r + 1..=self.needle.rows {
            if let Some(y) = self.row_img[r2] {
                hi = hi.min(y - (r2 - r) as i64);
                break;
            }
        }
        (lo, hi)
    }

    fn row_step<F>(&mut self, ci: usize, oi: usize, matched: &mut Vec<Point>, visit: &mut F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[Point]) -> ControlFlow<()>,
    {
        if oi == self.cols[ci].1.len() {
            return self.col_step(ci + 1, matched, visit);
        }
        let x = self.col_img[ci];
        let r = self.cols[ci].1[oi];
        if let Some(y) = self.row_img[r] {
            let p = Point::new(x, y);
            if !self.hay.contains(&p) {
                return Ok(ControlFlow::Continue(()));
            }
            matched.push(p);
            let res = if self.pruned(matched) {
                Ok(ControlFlow::Continue(()))
            } else {
                self.row_step(ci, oi + 1, matched, visit)
            };
            matched.pop();
            return res;
        }
        let (lo, hi) = self.row_window(r);
        if lo > hi {
            return Ok(ControlFlow::Continue(()));
        }
        let ys: Vec<i64> = self.hay.in_box(x, x, lo, hi).map(|p| p.y).collect();
        for y in ys {
            self.bump()?;
            self.row_img[r] = Some(y);
            matched.push(Point::new(x, y));
            let res = if self.pruned(matched) {
                Ok(ControlFlow::Continue(()))
            } else {
                self.row_step(ci, oi + 1, matched, visit)
            };
            matched.pop();
            self.row_img[r] = None;
            if res?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// First embedding found, as the matched haystack points.
pub fn find_occurrence(hay: &PointGrid, needle: &PatternMatrix) -> Option<Vec<Point>> {
    let mut found = None;
    let mut e = Embedder::new(hay, needle);
    let _ = e.run(&mut |pts: &[Point]| {
        found = Some(pts.to_vec());
        ControlFlow::Break(())
    })
    .expect("uncapped search");
    found
}

pub fn contains(hay: &PointGrid, needle: &PatternMatrix) -> bool {
    find_occurrence(hay, needle).is_some()
}

/// Does the permutation `x` contain the pattern `pi`?
pub fn perm_contains(x: &[usize], pi: &[usize]) -> bool {
    let hay = PointGrid::from_points(
        x.len(),
        x.iter().enumerate().map(|(i, &v)| Point::new(v, i as i64 + 1)),
    );
    match PatternMatrix::from_perm(pi) {
        Ok(needle) => contains(&hay, &needle),
        Err(_) => false,
    }
}

/// Smallest `k <= k_max` such that `x` avoids some pattern of size `k`.
pub fn avoidance_parameter(x: &[usize], k_max: usize) -> Option<usize> {
    (1..=k_max).find(|&k| all_permutations(k).iter().any(|pi| !perm_contains(x, pi)))
}

pub use crate::perm::longest_decreasing;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_examples() {
        assert!(perm_contains(&[2, 3, 1], &[2, 3, 1]));
        let hay = PointGrid::from_points(8, [(5, 1), (8, 2), (2, 3)].map(|(x, y)| Point::new(x, y)));
        assert!(contains(&hay, &PatternMatrix::from_perm(&[2, 3, 1]).unwrap()));
        let x = [6, 1, 3, 2, 8, 7, 4, 5];
        assert!(perm_contains(&x, &[2, 1, 3]));
        assert!(!perm_contains(&x, &[4, 3, 2, 1]));
        assert!(!perm_contains(&[1, 2, 3, 4, 5], &[2, 1]));
    }

    #[test]
    fn gadgets_match_formulas() {
        assert_eq!(alt(5), vec![3, 5, 1, 4, 2]);
        assert_eq!(alt(6), vec![3, 6, 1, 5, 2, 4]);
        assert_eq!(dec(3), vec![1, 2, 3]);
        assert_eq!(inc(3), vec![3, 2, 1]);
        assert_eq!(cap().kind(), Kind::Light);
        assert!(GadgetName::parse("wat:3").is_err());
        assert_eq!(GadgetName::parse("alt:5").unwrap(), GadgetName::Alt(5));
    }

    #[test]
    fn tensor_examples() {
        let p = PatternMatrix::from_perm(&[2, 1]).unwrap();
        let g = PatternMatrix::from_perm(&[1, 2]).unwrap();
        assert_eq!(p.tensor(&g).as_perm().unwrap(), vec![3, 4, 1, 2]);
        let one = PatternMatrix::from_perm(&[1]).unwrap();
        assert_eq!(one.tensor(&cap()), cap());
        let t = PatternMatrix::from_perm(&[2, 3, 1]).unwrap().tensor(&cap());
        assert_eq!((t.cols, t.rows, t.kind()), (9, 6, Kind::Light));
    }

    #[test]
    fn empty_needle_rows_need_room() {
        // Two ones with an empty row between them need three rows.
        let needle = PatternMatrix::new(2, 3, [(1, 1), (2, 3)]).unwrap();
        let tight = PointGrid::from_points(2, [Point::new(1, 1), Point::new(2, 2)]);
        assert!(!contains(&tight, &needle));
        let roomy = PointGrid::from_points(2, [Point::new(1, 1), Point::new(2, 3)]);
        assert!(contains(&roomy, &needle));
    }

    #[test]
    fn avoidance_examples() {
        assert_eq!(avoidance_parameter(&[1, 2, 3], 4), Some(2));
        assert_eq!(avoidance_parameter(&[2, 1], 4), Some(2));
        assert_eq!(avoidance_parameter(&[1], 3), Some(2));
    }
}
