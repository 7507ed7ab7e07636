//! Lattice points, rectangles, and the arborally-satisfied check.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `x` is the key column (1-based), `y` the time row. Rows at or below zero
/// hold initial-tree stacks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: usize,
    pub y: i64,
}

impl Point {
    pub fn new(x: usize, y: i64) -> Self {
        Point { x, y }
    }

    /// Row-major order key used for witnesses.
    pub fn yx(&self) -> (i64, usize) {
        (self.y, self.x)
    }
}

/// Closed axis-aligned rectangle spanned by two corners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub p: Point,
    pub q: Point,
}

impl Rect {
    pub fn new(p: Point, q: Point) -> Self {
        Rect { p, q }
    }
    pub fn xmin(&self) -> usize {
        self.p.x.min(self.q.x)
    }
    pub fn xmax(&self) -> usize {
        self.p.x.max(self.q.x)
    }
    pub fn ymin(&self) -> i64 {
        self.p.y.min(self.q.y)
    }
    pub fn ymax(&self) -> i64 {
        self.p.y.max(self.q.y)
    }
    pub fn contains(&self, r: &Point) -> bool {
        (self.xmin()..=self.xmax()).contains(&r.x) && (self.ymin()..=self.ymax()).contains(&r.y)
    }
    pub fn is_degenerate(&self) -> bool {
        self.p.x == self.q.x || self.p.y == self.q.y
    }
}

const NONE: i64 = i64::MIN;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointGrid {
    width: usize,
    rows: BTreeMap<i64, BTreeSet<usize>>,
    cols: Vec<BTreeSet<i64>>, // index 0 unused
    set: HashSet<Point>,
}

impl PointGrid {
    pub fn new(width: usize) -> Self {
        PointGrid {
            width,
            rows: BTreeMap::new(),
            cols: vec![BTreeSet::new(); width + 1],
            set: HashSet::new(),
        }
    }

    pub fn from_points(width: usize, pts: impl IntoIterator<Item = Point>) -> Self {
        let mut g = PointGrid::new(width);
        for p in pts {
            g.insert(p);
        }
        g
    }

    /// Inserts `p`, widening the grid if needed. Returns false if it was present.
    pub fn insert(&mut self, p: Point) -> bool {
        assert!(p.x >= 1, "columns are 1-based");
        if !self.set.insert(p) {
            return false;
        }
        if p.x > self.width {
            self.width = p.x;
            self.cols.resize(p.x + 1, BTreeSet::new());
        }
        self.rows.entry(p.y).or_default().insert(p.x);
        self.cols[p.x].insert(p.y);
        true
    }

    pub fn remove(&mut self, p: &Point) -> bool {
        if !self.set.remove(p) {
            return false;
        }
        let row = self.rows.get_mut(&p.y).unwrap();
        row.remove(&p.x);
        if row.is_empty() {
            self.rows.remove(&p.y);
        }
        self.cols[p.x].remove(&p.y);
        true
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.set.contains(p)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of stored points.
    pub fn weight(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    /// Points in row-major order (by y, then x).
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.rows
            .iter()
            .flat_map(|(&y, xs)| xs.iter().map(move |&x| Point::new(x, y)))
    }

    pub fn row_indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.rows.keys().copied()
    }

    pub fn row(&self, y: i64) -> impl Iterator<Item = usize> + '_ {
        self.rows.get(&y).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn column(&self, x: usize) -> impl Iterator<Item = i64> + '_ {
        self.cols.get(x).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn min_row(&self) -> Option<i64> {
        self.rows.keys().next().copied()
    }

    pub fn max_row(&self) -> Option<i64> {
        self.rows.keys().next_back().copied()
    }

    /// Last row `<= t` holding a point in column `b`.
    pub fn tau(&self, b: usize, t: i64) -> Option<i64> {
        self.cols.get(b)?.range(..=t).next_back().copied()
    }

    /// Points inside the closed box `[x1,x2] x [y1,y2]`.
    pub fn in_box(&self, x1: usize, x2: usize, y1: i64, y2: i64) -> impl Iterator<Item = Point> + '_ {
        let rows = if y1 <= y2 { Some(self.rows.range(y1..=y2)) } else { None };
        rows.into_iter().flatten().flat_map(move |(&y, xs)| {
            let r = if x1 <= x2 { Some(xs.range(x1..=x2)) } else { None };
            r.into_iter().flatten().map(move |&x| Point::new(x, y))
        })
    }

    pub fn union(&self, other: &PointGrid) -> PointGrid {
        let mut g = self.clone();
        for p in other.points() {
            g.insert(p);
        }
        g
    }

    /// Keeps only the points with `y` in `[y1, y2]`.
    pub fn restrict_rows(&self, y1: i64, y2: i64) -> PointGrid {
        PointGrid::from_points(self.width, self.in_box(1, self.width.max(1), y1, y2))
    }

    pub fn to_text(&self) -> String {
        let h = self.max_row().unwrap_or(0).max(0);
        let mut s = format!("{} {}\n", self.width, h);
        for p in self.points() {
            let _ = writeln!(s, "{} {}", p.x, p.y);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<PointGrid> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty grid file".into()))?;
        let (w, _h) = parse_pair::<usize, i64>(header)?;
        let mut g = PointGrid::new(w);
        for l in lines {
            let (x, y) = parse_pair::<usize, i64>(l)?;
            if x == 0 || x > w {
                return Err(Error::Parse(format!("column {x} outside 1..={w}")));
            }
            g.insert(Point::new(x, y));
        }
        Ok(g)
    }
}

fn parse_pair<A: std::str::FromStr, B: std::str::FromStr>(l: &str) -> Result<(A, B)> {
    let mut it = l.split_whitespace();
    let a = it.next().and_then(|t| t.parse().ok());
    let b = it.next().and_then(|t| t.parse().ok());
    match (a, b, it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::Parse(format!("expected two integers, got {l:?}"))),
    }
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    width: usize,
    points: Vec<(usize, i64)>,
}

impl Serialize for PointGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GridJson {
            width: self.width,
            points: self.points().map(|p| (p.x, p.y)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GridJson::deserialize(d)?;
        if j.points.iter().any(|&(x, _)| x == 0) {
            return Err(serde::de::Error::custom("columns are 1-based"));
        }
        Ok(PointGrid::from_points(j.width, j.points.into_iter().map(|(x, y)| Point::new(x, y))))
    }
}

pub fn is_rect_satisfied(grid: &PointGrid, r: &Rect) -> Result<bool> {
    if !grid.contains(&r.p) || !grid.contains(&r.q) {
        return invalid("rectangle corner is not a point of the grid");
    }
    if r.is_degenerate() {
        return Ok(true);
    }
    Ok(grid
        .in_box(r.xmin(), r.xmax(), r.ymin(), r.ymax())
        .any(|s| s != r.p && s != r.q))
}

/// `None` if the grid is arborally satisfied. Otherwise the least unsatisfied
/// pair, ordered by the upper corner's `(y, x)` and then the lower corner's;
/// the lower corner is returned as `p`.
///
/// Rows are swept upward. For a point `s` on row `y` and a column `b` on the
/// same side before the next point of the row, the pair `(s, (b, tau_b))` is
/// empty exactly when `tau_b` beats every `tau` over the columns from `s`
/// (inclusive) to `b` (exclusive). That makes the sweep O(width) per row.
pub fn first_unsatisfied(grid: &PointGrid) -> Option<Rect> {
    let w = grid.width();
    let mut tau = vec![NONE; w + 2];
    let mut prev_row: Option<i64> = None;
    for (&y, xs) in &grid.rows {
        if let Some(py) = prev_row {
            let s: Vec<usize> = xs.iter().copied().collect();
            for (i, &sx) in s.iter().enumerate() {
                let right_end = s.get(i + 1).copied().unwrap_or(w + 1);
                let left_end = if i == 0 { 0 } else { s[i - 1] };
                let mut best: Option<(i64, usize)> = None;
                let mut consider = |b: usize, tb: i64| {
                    if best.is_none_or(|bb| (tb, b) < bb) {
                        best = Some((tb, b));
                    }
                };
                let mut m = tau[sx];
                for b in sx + 1..right_end {
                    if m >= py {
                        break;
                    }
                    if tau[b] != NONE && tau[b] > m {
                        consider(b, tau[b]);
                        m = tau[b];
                    }
                }
                let mut m = tau[sx];
                for b in (left_end + 1..sx).rev() {
                    if m >= py {
                        break;
                    }
                    if tau[b] != NONE && tau[b] > m {
                        consider(b, tau[b]);
                        m = tau[b];
                    }
                }
                if let Some((tb, b)) = best {
                    return Some(Rect::new(Point::new(b, tb), Point::new(sx, y)));
                }
            }
        }
        for &x in xs {
            tau[x] = y;
        }
        prev_row = Some(y);
    }
    None
}

pub fn is_satisfied_set(grid: &PointGrid) -> bool {
    first_unsatisfied(grid).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(pts: &[(usize, i64)]) -> PointGrid {
        let w = pts.iter().map(|p| p.0).max().unwrap_or(0);
        PointGrid::from_points(w, pts.iter().map(|&(x, y)| Point::new(x, y)))
    }

    #[test]
    fn rect_examples() {
        let a = Point::new(1, 1);
        let b = Point::new(2, 2);
        assert!(!is_rect_satisfied(&g(&[(1, 1), (2, 2)]), &Rect::new(a, b)).unwrap());
        let c = Point::new(2, 1);
        assert!(is_rect_satisfied(&g(&[(1, 1), (2, 1)]), &Rect::new(a, c)).unwrap());
        assert!(is_rect_satisfied(&g(&[(1, 1), (2, 2), (1, 2)]), &Rect::new(a, b)).unwrap());
        assert!(is_rect_satisfied(&g(&[(1, 1)]), &Rect::new(a, b)).is_err());
    }

    #[test]
    fn satisfied_examples() {
        assert!(is_satisfied_set(&g(&[(1, 1)])));
        assert!(is_satisfied_set(&PointGrid::new(0)));
        let w = first_unsatisfied(&g(&[(1, 1), (2, 2)])).unwrap();
        assert_eq!((w.p, w.q), (Point::new(1, 1), Point::new(2, 2)));
    }

    #[test]
    fn text_round_trip() {
        let grid = g(&[(1, -1), (2, 0), (3, 4)]);
        let back = PointGrid::from_text(&grid.to_text()).unwrap();
        assert_eq!(grid, back);
        let json = serde_json::to_string(&grid).unwrap();
        assert_eq!(serde_json::from_str::<PointGrid>(&json).unwrap(), grid);
    }

    #[test]
    fn tau_is_last_row_at_or_before() {
        let grid = g(&[(1, -1), (1, 3), (1, 5)]);
        assert_eq!(grid.tau(1, 4), Some(3));
        assert_eq!(grid.tau(1, -2), None);
        assert_eq!(grid.tau(2, 9), None);
    }
}
