//! Plain permutation helpers. Permutations are `Vec<usize>` holding the values
//! `1..=n` in one-line notation.

use crate::error::{invalid, Error, Result};

pub fn is_permutation(p: &[usize]) -> bool {
    let n = p.len();
    let mut seen = vec![false; n + 1];
    for &v in p {
        if v == 0 || v > n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

pub fn check_permutation(p: &[usize]) -> Result<()> {
    if is_permutation(p) {
        Ok(())
    } else {
        invalid(format!("{:?} is not a permutation of 1..={}", p, p.len()))
    }
}

pub fn identity(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v - 1] = i + 1;
    }
    inv
}

/// Replace each value by its rank among the values (ties broken by position).
pub fn rank_compress<T: Ord + Copy>(vals: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by_key(|&i| (vals[i], i));
    let mut out = vec![0; vals.len()];
    for (r, &i) in idx.iter().enumerate() {
        out[i] = r + 1;
    }
    out
}

/// Lexicographic successor in place; false once `p` was the last permutation.
pub fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All permutations of size `n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p = identity(n);
    loop {
        out.push(p.clone());
        if !next_permutation(&mut p) {
            break;
        }
    }
    out
}

/// Parses `2,3,1` (also accepts whitespace separators).
pub fn parse_perm(s: &str) -> Result<Vec<usize>> {
    let vals = parse_list(s)?;
    check_permutation(&vals)?;
    Ok(vals)
}

pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
        })
        .collect()
}

pub fn format_list(p: &[usize]) -> String {
    p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Length of the longest strictly decreasing subsequence (patience sorting on
/// the negated values).
pub fn longest_decreasing(p: &[usize]) -> usize {
    let mut piles: Vec<usize> = Vec::new();
    for &v in p {
        // tops kept increasing in -v, i.e. decreasing in v
        let pos = piles.partition_point(|&top| top > v);
        if pos == piles.len() {
            piles.push(v);
        } else {
            piles[pos] = v;
        }
    }
    piles.len()
}

pub fn longest_increasing(p: &[usize]) -> usize {
    let mut piles: Vec<usize> = Vec::new();
    for &v in p {
        let pos = piles.partition_point(|&top| top < v);
        if pos == piles.len() {
            piles.push(v);
        } else {
            piles[pos] = v;
        }
    }
    piles.len()
}

/// Pattern of the subsequence at the given positions.
pub fn restrict(p: &[usize], positions: &[usize]) -> Vec<usize> {
    let vals: Vec<usize> = positions.iter().map(|&i| p[i]).collect();
    rank_compress(&vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lds_examples() {
        assert_eq!(longest_decreasing(&[1, 2, 3, 4]), 1);
        assert_eq!(longest_decreasing(&[4, 3, 2, 1]), 4);
        assert_eq!(longest_decreasing(&[2, 1, 4, 3]), 2);
        assert_eq!(longest_increasing(&[2, 1, 4, 3]), 2);
    }

    #[test]
    fn enumerates_factorial() {
        assert_eq!(all_permutations(0).len(), 1);
        assert_eq!(all_permutations(4).len(), 24);
        assert!(all_permutations(5).iter().all(|p| is_permutation(p)));
    }

    #[test]
    fn rank_and_inverse() {
        assert_eq!(rank_compress(&[5, 8, 2]), vec![2, 3, 1]);
        assert_eq!(inverse(&[2, 3, 1]), vec![3, 1, 2]);
        assert_eq!(parse_perm("2,3,1").unwrap(), vec![2, 3, 1]);
        assert!(parse_perm("2,2").is_err());
    }
}
