//! Glueing two non-3-colourable graphs along critical edges through a gadget.

use super::{enumerated_graphs, find_critical, Gadget};
use crate::error::{guard, Error, Result};
use crate::graph::Graph;
use crate::solver::{three_color, three_color_certificate, Certificate};

/// `(g, e) ⊕ (h, f)`: the union of `g - e`, `h - f` and the gadget with `x, x'`
/// identified with the endpoints of `e` and `y, y'` with those of `f`.
///
/// Vertices of `g` keep their numbers, vertices of `h` are shifted by
/// `|V(g)|`, and the unmarked gadget vertices follow in order. Returns the
/// glued graph and the image of the gadget's marked edge.
pub fn glue(g: &Graph, e: (usize, usize), h: &Graph, f: (usize, usize), gadget: &Gadget) -> Result<(Graph, (usize, usize))> {
    let g_minus = g.remove_edge(e.0, e.1)?;
    let h_minus = h.remove_edge(f.0, f.1)?;
    if e.0 == e.1 || f.0 == f.1 {
        return Err(Error::InvalidInstance("cannot glue along a loop".into()));
    }
    let (ng, nh) = (g.vertex_count(), h.vertex_count());
    let [x, x1, y, y1] = gadget.marks;
    let mut image = vec![usize::MAX; gadget.vertex_count()];
    image[x] = e.0;
    image[x1] = e.1;
    image[y] = ng + f.0;
    image[y1] = ng + f.1;
    let mut next = ng + nh;
    for slot in image.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = next;
        next += 1;
    }
    let edges = g_minus
        .edges()
        .iter()
        .copied()
        .chain(h_minus.edges().iter().map(|&(u, v)| (u + ng, v + ng)))
        .chain(gadget.graph.edges().iter().map(|&(u, v)| (image[u], image[v])));
    let w = Graph::new(next, edges)?;
    let (a, b) = (image[gadget.d.0], image[gadget.d.1]);
    Ok((w, (a.min(b), a.max(b))))
}

/// One element of a glued chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueStep {
    pub graph: Graph,
    /// The critical edge carried to the next step.
    pub d: (usize, usize),
    /// Refutation of a 3-colouring of the graph.
    pub coloring: Certificate,
    /// A 3-colouring of the graph without `d`.
    pub critical: Vec<usize>,
}

/// `W_1` is the critical reduction of the first enumerated graph; `W_{n+1}`
/// glues `(W_n, d_n)` to the critical reduction of the next enumerated graph
/// through `gadget`. Every step is checked: `W_n` is not 3-colourable and
/// `W_n - d_n` is.
pub fn glue_chain(k: usize, gadget: &Gadget, max_n: usize, max_vertices: usize) -> Result<Vec<GlueStep>> {
    let graphs = enumerated_graphs(k, max_n)?;
    let reduced: Vec<(Graph, (usize, usize))> =
        graphs.iter().map(|g| find_critical(g).expect("enumerated graphs are not 3-colourable")).collect();
    let estimate: u128 = reduced.iter().map(|(g, _)| g.vertex_count() as u128).sum::<u128>()
        + (reduced.len().saturating_sub(1) as u128) * (gadget.vertex_count() as u128 - 4);
    guard("vertices in the last glued graph", estimate, max_vertices as u128)?;

    let mut steps: Vec<GlueStep> = Vec::with_capacity(k);
    for (g, e) in reduced {
        let (graph, d) = match steps.last() {
            None => (g, e),
            Some(prev) => glue(&prev.graph, prev.d, &g, e, gadget)?,
        };
        let coloring = three_color_certificate(&graph);
        let critical = three_color(&graph.remove_edge(d.0, d.1)?);
        match (coloring.is_exhausted(), critical) {
            (true, Some(critical)) => steps.push(GlueStep { graph, d, coloring, critical }),
            _ => return Err(Error::InvalidGadget(format!("step {} is not critical; is the gadget verified?", steps.len() + 1))),
        }
    }
    Ok(steps)
}
