use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Point, PointGrid};
use crate::perm::{format_list, is_permutation, parse_list};

/// Keys `x_1..x_m` over the universe `1..=n`; row `t` of the access matrix
/// holds the single point `(x_t, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessSequence {
    n: usize,
    keys: Vec<usize>,
}

impl AccessSequence {
    pub fn new(n: usize, keys: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = keys.iter().find(|&&k| k == 0 || k > n) {
            return invalid(format!("key {bad} outside 1..={n}"));
        }
        Ok(AccessSequence { n, keys })
    }

    pub fn from_perm(p: Vec<usize>) -> Result<Self> {
        if !is_permutation(&p) {
            return invalid(format!("{p:?} is not a permutation"));
        }
        Ok(AccessSequence { n: p.len(), keys: p })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.keys.len()
    }
    pub fn keys(&self) -> &[usize] {
        &self.keys
    }
    /// Key accessed at time `t` (1-based).
    pub fn at(&self, t: usize) -> usize {
        self.keys[t - 1]
    }
    pub fn is_permutation(&self) -> bool {
        self.keys.len() == self.n && is_permutation(&self.keys)
    }

    pub fn access_grid(&self) -> PointGrid {
        PointGrid::from_points(
            self.n,
            self.keys.iter().enumerate().map(|(i, &x)| Point::new(x, i as i64 + 1)),
        )
    }

    pub fn to_text(&self) -> String {
        let body: Vec<String> = self.keys.iter().map(|k| k.to_string()).collect();
        format!("{} {}\n{}\n", self.n, self.m(), body.join(" "))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty sequence file".into()))?;
        let hv = parse_list(header)?;
        if hv.len() != 2 {
            return Err(Error::Parse(format!("header must be `n m`, got {header:?}")));
        }
        let mut keys = Vec::new();
        for l in lines {
            keys.extend(parse_list(l)?);
        }
        if keys.len() != hv[1] {
            return Err(Error::Parse(format!("header says m={} but {} keys follow", hv[1], keys.len())));
        }
        AccessSequence::new(hv[0], keys).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl std::fmt::Display for AccessSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", format_list(&self.keys))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let x = AccessSequence::new(4, vec![2, 1, 2, 4]).unwrap();
        assert_eq!(x.to_text(), "4 4\n2 1 2 4\n");
        assert_eq!(AccessSequence::from_text(&x.to_text()).unwrap(), x);
        assert!(!x.is_permutation());
        assert!(AccessSequence::from_text("3 2\n1 5\n").is_err());
        assert!(AccessSequence::from_text("3 3\n1 2\n").is_err());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(AccessSequence::new(2, vec![0]).is_err());
        assert!(AccessSequence::from_perm(vec![1, 1]).is_err());
    }
}
