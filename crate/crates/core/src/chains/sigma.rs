//! The three 6-slot variable patterns used when glueing along a gadget, and
//! the argument permutations relating them.

use crate::error::{Error, Result};
use crate::graph::next_permutation;

/// Patterns over `x = 0`, `y = 1`, `z = 2`, numbered 1 to 3:
/// `(x,y,x,z,y,z)`, `(y,x,z,x,z,y)` and `(z,z,y,y,x,x)`.
pub struct SigmaPatterns;

impl SigmaPatterns {
    pub const PATTERNS: [[usize; 6]; 3] = [[0, 1, 0, 2, 1, 2], [1, 0, 2, 0, 2, 1], [2, 2, 1, 1, 0, 0]];

    /// Pattern `i` for `i` in `1..=3`.
    pub fn pattern(i: usize) -> Result<[usize; 6]> {
        match i {
            1..=3 => Ok(Self::PATTERNS[i - 1]),
            _ => Err(Error::InvalidInstance(format!("pattern index {i} outside 1..=3"))),
        }
    }

    /// Whether the column pairs of patterns `i` and `j` are the six ordered
    /// pairs of distinct variables, each exactly once.
    pub fn columns_are_distinct_pairs(i: usize, j: usize) -> Result<bool> {
        let (p, q) = (Self::pattern(i)?, Self::pattern(j)?);
        let mut cols: Vec<(usize, usize)> = p.into_iter().zip(q).collect();
        cols.sort();
        cols.dedup();
        Ok(cols.len() == 6 && cols.iter().all(|(a, b)| a != b))
    }
}

/// Every permutation `σ` of `1..=6` (one-line notation) with
/// `(t[σ(k)], s[σ(k)]) = (P_i[k], P_j[k])` for all `k`, where `t` and `s` are
/// patterns 1 and 2. Found by trying all 720 permutations.
pub fn sigma_candidates(i: usize, j: usize) -> Result<Vec<[usize; 6]>> {
    let (pi, pj) = (SigmaPatterns::pattern(i)?, SigmaPatterns::pattern(j)?);
    let [t, s, _] = SigmaPatterns::PATTERNS;
    let mut perm = [0, 1, 2, 3, 4, 5];
    let mut out = Vec::new();
    loop {
        if (0..6).all(|k| t[perm[k]] == pi[k] && s[perm[k]] == pj[k]) {
            out.push(perm.map(|x| x + 1));
        }
        if !next_permutation(&mut perm) {
            return Ok(out);
        }
    }
}

/// The unique `σ` of [`sigma_candidates`] for distinct `i`, `j` in `1..=3`.
pub fn sigma_permutation(i: usize, j: usize) -> Result<[usize; 6]> {
    if i == j {
        return Err(Error::InvalidInstance("pattern indices must differ".into()));
    }
    match sigma_candidates(i, j)?.as_slice() {
        [only] => Ok(*only),
        other => Err(Error::InvalidInstance(format!("{} permutations match patterns {i}, {j}", other.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_permutations() {
        assert_eq!(sigma_permutation(1, 2).unwrap(), [1, 2, 3, 4, 5, 6]);
        assert_eq!(sigma_permutation(1, 3).unwrap(), [3, 5, 1, 6, 2, 4]);
        assert!(sigma_permutation(2, 2).is_err());
        assert!(sigma_permutation(0, 2).is_err());
    }

    #[test]
    fn every_ordered_pair_has_exactly_one() {
        for i in 1..=3 {
            for j in (1..=3).filter(|&j| j != i) {
                assert!(SigmaPatterns::columns_are_distinct_pairs(i, j).unwrap());
                assert_eq!(sigma_candidates(i, j).unwrap().len(), 1, "({i}, {j})");
            }
            assert!(!SigmaPatterns::columns_are_distinct_pairs(i, i).unwrap());
        }
    }
}
