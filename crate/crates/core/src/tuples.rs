//! Mixed-radix numbering of tuples, first coordinate most significant.

/// Index of `t` among all tuples over `0..base`.
pub fn encode(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * base + x)
}

/// Inverse of [`encode`].
pub fn decode(mut index: usize, base: usize, arity: usize) -> Vec<usize> {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    t
}

/// `base^arity`, or `None` on overflow.
pub fn count(base: usize, arity: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(arity).ok()?)
}

/// Step `t` to the next tuple over `0..base` (odometer order).
/// Returns `false` after the last tuple, leaving `t` all zeros.
pub fn advance(t: &mut [usize], base: usize) -> bool {
    for slot in t.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn decode_inverts_encode(base in 1usize..6, arity in 1usize..6, seed in any::<u64>()) {
            let size = count(base, arity).unwrap();
            let index = (seed as usize) % size;
            prop_assert_eq!(encode(&decode(index, base, arity), base), index);
        }
    }

    #[test]
    fn odometer_visits_in_index_order() {
        let mut t = vec![0; 3];
        let mut seen = vec![encode(&t, 3)];
        while advance(&mut t, 3) {
            seen.push(encode(&t, 3));
        }
        assert_eq!(seen, (0..27).collect::<Vec<_>>());
    }
}
