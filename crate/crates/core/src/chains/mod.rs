//! Chains of ever weaker graph conditions and the machinery around them:
//! tensor chains, critical edges, gadget glueing, the CSS membership test and
//! the growth schedule of the superposition construction.

pub mod critical;
pub mod css;
pub mod gadget;
pub mod glue;
pub mod growth;
pub mod sigma;
pub mod tensor;

pub use critical::find_critical;
pub use css::{css_decide, CssVerdict};
pub use gadget::{search_gadget, verify_gadget, Gadget, GadgetCertificate, GadgetViolation};
pub use glue::{glue, glue_chain, GlueStep};
pub use growth::{growth_g, growth_inequality_holds, Growth};
pub use sigma::{sigma_candidates, sigma_permutation, SigmaPatterns};
pub use tensor::{tensor_chain, TensorStep};

use crate::error::{Error, Result};
use crate::graph::{enumerate_non_3col, Graph};

/// The first `k` graphs of the enumeration of connected non-3-colourable
/// graphs on at most `max_n` vertices, starting over when it runs out.
pub fn enumerated_graphs(k: usize, max_n: usize) -> Result<Vec<Graph>> {
    let pool: Vec<Graph> = enumerate_non_3col(max_n).take(k).collect();
    if pool.is_empty() && k > 0 {
        return Err(Error::InvalidInstance(format!("no non-3-colourable graphs on at most {max_n} vertices")));
    }
    Ok(pool.iter().cycle().take(k).cloned().collect())
}

/// Call `visit` on every proper `k`-colouring of `g`, in lexicographic order,
/// until it returns `false`. Returns the number of colourings visited.
pub fn for_each_coloring(g: &Graph, k: usize, mut visit: impl FnMut(&[usize]) -> bool) -> usize {
    let n = g.vertex_count();
    let mut colors = vec![usize::MAX; n];
    let mut count = 0;
    if n == 0 {
        visit(&colors);
        return 1;
    }
    let fits = |colors: &[usize], v: usize, c: usize| {
        g.neighbors(v).iter().all(|&u| u > v || (u < v && colors[u] != c))
    };
    let mut v = 0;
    loop {
        // Advance vertex v to its next admissible colour, or backtrack.
        let start = if colors[v] == usize::MAX { 0 } else { colors[v] + 1 };
        match (start..k).find(|&c| fits(&colors, v, c)) {
            Some(c) => {
                colors[v] = c;
                if v + 1 == n {
                    count += 1;
                    if !visit(&colors) {
                        return count;
                    }
                } else {
                    v += 1;
                }
            }
            None => {
                colors[v] = usize::MAX;
                if v == 0 {
                    return count;
                }
                v -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coloring_counts() {
        // Proper 3-colourings: K3 has 6, C4 has 18, K4 none, a loop none.
        let count = |g: &Graph| for_each_coloring(g, 3, |_| true);
        assert_eq!(count(&Graph::complete(3)), 6);
        assert_eq!(count(&Graph::cycle(4)), 18);
        assert_eq!(count(&Graph::complete(4)), 0);
        assert_eq!(count(&Graph::loop_vertex()), 0);
        assert_eq!(count(&Graph::empty(2)), 9);
    }

    #[test]
    fn enumeration_repeats_when_exhausted() {
        let gs = enumerated_graphs(3, 4).unwrap();
        assert!(gs.iter().all(|g| *g == Graph::complete(4)));
        assert!(enumerated_graphs(1, 3).is_err());
    }
}
