//! Encoding graphs on tuples of higher arity.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::structure::RelStructure;

/// Replace every vertex `x` of `g` by the `n` fresh elements
/// `x*n .. x*n + n` and every edge `{x, y}` by the `2n`-ary tuples
/// `(x̄, ȳ)` and `(ȳ, x̄)` of a single relation `R`.
pub fn blowup_encode(g: &Graph, n: usize) -> Result<RelStructure> {
    if n == 0 {
        return Err(Error::ArityTooSmall { min: 1, got: 0 });
    }
    if g.has_loops() {
        return Err(Error::HasLoops);
    }
    let block = |x: usize| x * n..x * n + n;
    let tuples = g.arcs().into_iter().map(|(x, y)| block(x).chain(block(y)).collect());
    RelStructure::new(n * g.vertex_count()).with_relation("R", 2 * n, tuples)
}

/// A set partition of `0..len` in restricted-growth form: `blocks[i]` is the
/// block of element `i`, and each block index first appears in order.
pub type Partition = Vec<usize>;

/// All partitions of the `2n` coordinates of one `R`-tuple into fewer than
/// `2n` blocks: the identification patterns of a single tuple that are
/// forbidden in the encoding. There are `Bell(2n) - 1` of them, listed in
/// lexicographic order of their restricted-growth strings.
pub fn loop_like_patterns(n: usize) -> Result<Vec<Partition>> {
    if n == 0 {
        return Err(Error::ArityTooSmall { min: 1, got: 0 });
    }
    let len = 2 * n;
    let mut out = Vec::new();
    let mut rgs = vec![0usize; len];
    loop {
        let blocks = rgs.iter().max().map_or(0, |m| m + 1);
        if blocks < len {
            out.push(rgs.clone());
        }
        if !next_rgs(&mut rgs) {
            return Ok(out);
        }
    }
}

fn next_rgs(rgs: &mut [usize]) -> bool {
    for i in (1..rgs.len()).rev() {
        let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
        if rgs[i] <= max_prefix {
            rgs[i] += 1;
            for slot in &mut rgs[i + 1..] {
                *slot = 0;
            }
            return true;
        }
    }
    false
}
