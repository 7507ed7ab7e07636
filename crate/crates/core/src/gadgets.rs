//! Occurrences of gadget patterns in touch matrices and the access points
//! their bounding boxes must see.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::Point;
use crate::greedy::ExecutionTrace;
use crate::patterns::{Embedder, PatternMatrix};
use crate::perm::{longest_decreasing, longest_increasing};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetMode {
    Capture,
    Increasing(usize),
    Decreasing(usize),
    Alternating(usize),
}

impl GadgetMode {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "capture" {
            return Ok(GadgetMode::Capture);
        }
        let (name, k) = match s.split_once(':') {
            Some((a, b)) => (a, b.parse::<usize>().ok()),
            None => (s, None),
        };
        match (name, k) {
            ("increasing", Some(k)) => Ok(GadgetMode::Increasing(k)),
            ("decreasing", Some(k)) => Ok(GadgetMode::Decreasing(k)),
            ("alternating", Some(k)) => Ok(GadgetMode::Alternating(k)),
            _ => invalid(format!("unknown gadget mode {s:?}")),
        }
    }
}

/// Bounding box of an occurrence, inclusive on all sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BoxSpan {
    pub xmin: usize,
    pub xmax: usize,
    pub ymin: i64,
    pub ymax: i64,
}

impl BoxSpan {
    pub fn of(pts: &[Point]) -> BoxSpan {
        BoxSpan {
            xmin: pts.iter().map(|p| p.x).min().unwrap_or(0),
            xmax: pts.iter().map(|p| p.x).max().unwrap_or(0),
            ymin: pts.iter().map(|p| p.y).min().unwrap_or(0),
            ymax: pts.iter().map(|p| p.y).max().unwrap_or(0),
        }
    }
}

pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

struct AccessIndex<'a> {
    keys: &'a [usize],
}

impl AccessIndex<'_> {
    fn window(&self, b: &BoxSpan) -> impl Iterator<Item = usize> + '_ {
        let lo = b.ymin.max(1) as usize;
        let hi = (b.ymax.max(0) as usize).min(self.keys.len());
        self.keys[(lo - 1).min(hi)..hi].iter().copied()
    }

    fn inside(&self, b: &BoxSpan) -> bool {
        self.window(b).any(|x| (b.xmin..=b.xmax).contains(&x))
    }

    fn explained(&self, b: &BoxSpan, mode: GadgetMode) -> bool {
        if self.inside(b) {
            return true;
        }
        match mode {
            GadgetMode::Capture => false,
            GadgetMode::Increasing(k) => {
                let left: Vec<usize> = self.window(b).filter(|&x| x < b.xmin).collect();
                longest_increasing(&left) >= k
            }
            GadgetMode::Decreasing(k) => {
                let right: Vec<usize> = self.window(b).filter(|&x| x > b.xmax).collect();
                longest_decreasing(&right) >= k
            }
            GadgetMode::Alternating(k) => {
                // earliest-first choice is optimal for a fixed side pattern
                let mut len = 0;
                for x in self.window(b) {
                    let want_right = len % 2 == 0;
                    if (want_right && x > b.xmax) || (!want_right && x < b.xmin) {
                        len += 1;
                    }
                }
                len >= k
            }
        }
    }
}

/// Bounding boxes of `gadget` occurrences in the touch rows of `trace` that
/// satisfy neither alternative of `mode`. Partial matches whose box already
/// holds an access point are not extended, since every completion would be
/// explained by that point.
pub fn find_gadget_violations(
    trace: &ExecutionTrace,
    gadget: &PatternMatrix,
    mode: GadgetMode,
    node_cap: u64,
) -> Result<Vec<BoxSpan>> {
    let hay = trace.touch_grid();
    let acc = AccessIndex { keys: trace.input.keys() };
    let prune = |pts: &[Point]| acc.inside(&BoxSpan::of(pts));
    let mut spans = BTreeSet::new();
    let mut e = Embedder::new(&hay, gadget).with_prune(&prune);
    e.node_cap = node_cap;
    let _ = e.run(&mut |pts: &[Point]| {
        spans.insert(BoxSpan::of(pts));
        ControlFlow::Continue(())
    })?;
    Ok(spans.into_iter().filter(|b| !acc.explained(b, mode)).collect())
}
