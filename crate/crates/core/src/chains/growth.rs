//! The growth schedule `g` of the superposition construction.
//!
//! Given sizes `s_1, s_2, ..`, set `g(1) = 1` and let `k_n` be the least
//! `k > g(n)` for which
//!
//! ```text
//! sum_{i <= n} k'^(g(i) * s_i) < 3^ceil(sqrt(k'))   for all k' >= k
//! ```
//!
//! is certified, then `g(n + 1) = k_n + 1`. The "for all" is certified by an
//! effective sufficient condition. With `E = max_i g(i) * s_i`, the function
//! `phi(k) = sqrt(k) ln 3 - E ln k - ln n` is increasing once
//! `k > 4 E^2 / (ln 3)^2`, and `phi(k) > 0` gives the inequality at `k`
//! because the sum is at most `n k^E`. So `k_n` is the least `k` above both
//! `g(n)` and that threshold with `n k^E < 3^floor(sqrt(k))`, which implies
//! `phi(k) > 0`. All comparisons use exact integers.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{guard, Error, Result};

/// Values of the schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Growth {
    /// `g(1), .., g(n + 1)` for `n` sizes.
    pub g: Vec<u64>,
    /// `k_1, .., k_n`.
    pub k: Vec<u64>,
}

/// Cap on the bit length of the integers compared.
const MAX_BITS: u128 = 1 << 26;

fn pow(base: u64, exp: u64) -> Result<BigUint> {
    let bits = (64 - base.leading_zeros()) as u128 * exp as u128;
    guard("bits of a power", bits, MAX_BITS)?;
    Ok(BigUint::from(base).pow(u32::try_from(exp).map_err(|_| Error::ResourceGuard {
        what: "exponent",
        estimate: exp as u128,
        cap: u32::MAX as u128,
    })?))
}

fn isqrt(k: u64) -> u64 {
    let mut s = (k as f64).sqrt() as u64;
    while s * s > k {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= k {
        s += 1;
    }
    s
}

fn ceil_sqrt(k: u64) -> u64 {
    let s = isqrt(k);
    if s * s == k {
        s
    } else {
        s + 1
    }
}

/// `n k^E < 3^floor(sqrt(k))`.
fn dominated(n: u64, k: u64, e: u64) -> Result<bool> {
    Ok(BigUint::from(n) * pow(k, e)? < pow(3, isqrt(k))?)
}

/// Least `t` with `t (ln 3)^2 > 4 E^2`, using `ln 3 > 1.0986`.
fn threshold(e: u64) -> u64 {
    let num = 4 * (e as u128) * (e as u128) * 100_000_000;
    let den = 10_986u128 * 10_986;
    u64::try_from(num / den + 1).unwrap_or(u64::MAX)
}

/// Whether `sum_{i <= n} k^(g(i) * s_i) < 3^ceil(sqrt(k))` holds exactly.
pub fn growth_inequality_holds(sizes: &[u64], g: &[u64], k: u64) -> Result<bool> {
    let mut sum = BigUint::default();
    for (&s, &gi) in sizes.iter().zip(g) {
        sum += pow(k, gi.checked_mul(s).ok_or_else(|| overflow("exponent"))?)?;
    }
    Ok(sum < pow(3, ceil_sqrt(k))?)
}

fn overflow(what: &'static str) -> Error {
    Error::ResourceGuard { what, estimate: u128::MAX, cap: u64::MAX as u128 }
}

/// Compute `g(1), .., g(n + 1)` for `n = sizes.len()`, failing if some
/// `k_n` exceeds `k_max`.
pub fn growth_g(sizes: &[u64], k_max: u64) -> Result<Growth> {
    if sizes.is_empty() {
        return Err(Error::InvalidInstance("sizes must be non-empty".into()));
    }
    let mut g = vec![1u64];
    let mut ks = Vec::new();
    for n in 1..=sizes.len() {
        let e = sizes[..n]
            .iter()
            .zip(&g)
            .map(|(&s, &gi)| gi.checked_mul(s).ok_or_else(|| overflow("exponent")))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .expect("n >= 1");
        let low = (g[n - 1] + 1).max(threshold(e));
        guard("k", low as u128, k_max as u128)?;
        let k = if dominated(n as u64, low, e)? {
            low
        } else {
            // Beyond the threshold the condition at squares is monotone in
            // the root, and between squares only the left side grows; so the
            // least solution is a square.
            let mut lo = isqrt(low);
            let mut hi = lo + 1;
            while !dominated(n as u64, hi * hi, e)? {
                lo = hi;
                hi *= 2;
                guard("k", (hi as u128) * (hi as u128), k_max as u128)?;
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if dominated(n as u64, mid * mid, e)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi * hi
        };
        guard("k", k as u128, k_max as u128)?;
        ks.push(k);
        g.push(k + 1);
    }
    Ok(Growth { g, k: ks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_roots() {
        for k in 0..2000u64 {
            let s = isqrt(k);
            assert!(s * s <= k && (s + 1) * (s + 1) > k);
            let c = ceil_sqrt(k);
            assert!(c * c >= k && (c == 0 || (c - 1) * (c - 1) < k));
        }
    }

    #[test]
    fn single_k4() {
        let out = growth_g(&[4], 1 << 40).unwrap();
        assert_eq!(out.g[0], 1);
        let k = out.k[0];
        assert!(out.g[1] == k + 1 && k > 1);
        assert!(growth_inequality_holds(&[4], &out.g, k).unwrap());
        // The certificate: threshold reached and the floor form holds at k.
        assert!(k >= threshold(4) && dominated(1, k, 4).unwrap());
        // k is least among candidates at or above the threshold.
        assert!(!(threshold(4)..k).any(|j| dominated(1, j, 4).unwrap()));
    }

    #[test]
    fn two_sizes_strictly_increasing() {
        let sizes = [4, 5];
        let out = growth_g(&sizes, 1 << 40).unwrap();
        assert_eq!(out.g.len(), 3);
        assert!(out.g.windows(2).all(|w| w[0] < w[1]));
        for (n, &k) in out.k.iter().enumerate() {
            assert!(growth_inequality_holds(&sizes[..=n], &out.g, k).unwrap());
        }
    }

    #[test]
    fn k_max_is_enforced() {
        assert!(matches!(growth_g(&[4], 10), Err(Error::ResourceGuard { .. })));
        assert!(growth_g(&[], 10).is_err());
    }
}
