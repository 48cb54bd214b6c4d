//! Critical edges of non-3-colourable graphs.

use crate::graph::Graph;
use crate::solver::three_color;

/// Remove the lexicographically first edge as long as the graph stays
/// non-3-colourable. Returns the last non-3-colourable graph and the edge
/// whose removal makes it 3-colourable, or `None` if `g` is 3-colourable.
pub fn find_critical(g: &Graph) -> Option<(Graph, (usize, usize))> {
    if three_color(g).is_some() {
        return None;
    }
    let mut current = g.clone();
    loop {
        // A non-3-colourable graph has an edge; take the first one.
        let e = current.edges()[0];
        let smaller = current.remove_edge(e.0, e.1).expect("edge is present");
        if three_color(&smaller).is_some() {
            return Some((current, e));
        }
        current = smaller;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_is_critical_at_its_first_edge() {
        let (h, e) = find_critical(&Graph::complete(4)).unwrap();
        assert_eq!(h, Graph::complete(4));
        assert_eq!(e, (0, 1));
        assert!(find_critical(&Graph::complete(3)).is_none());
    }

    #[test]
    fn pendant_edge_is_removed() {
        let g = Graph::new(5, [(0, 4)].into_iter().chain(Graph::complete(4).edges().iter().copied())).unwrap();
        let (h, e) = find_critical(&g).unwrap();
        assert!(three_color(&h).is_none());
        assert!(three_color(&h.remove_edge(e.0, e.1).unwrap()).is_some());
        assert!(h.edges().iter().all(|x| g.has_edge(x.0, x.1)));
        assert_eq!(h.vertex_count(), 5);
    }

    #[test]
    fn loops_are_critical() {
        let g = Graph::new(2, [(0, 0), (0, 1)]).unwrap();
        let (h, e) = find_critical(&g).unwrap();
        assert_eq!(e, (0, 0));
        assert_eq!(h, g);
    }
}
