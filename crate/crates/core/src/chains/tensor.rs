//! The tensor chain `H_n = G_1 × .. × G_n`.

use super::enumerated_graphs;
use crate::error::{guard, Result};
use crate::graph::{tensor_product, Graph};
use crate::solver::{three_color_certificate, Certificate};

/// One element of a tensor chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorStep {
    pub graph: Graph,
    /// Result of 3-colouring the graph; exhaustion for every valid step.
    pub coloring: Certificate,
    /// The coordinate projection to the previous element, absent for the first.
    pub projection: Option<Vec<usize>>,
}

/// The first `k` prefix products of the enumeration of non-3-colourable
/// graphs on at most `max_n` vertices. Products larger than `max_vertices`
/// are refused.
pub fn tensor_chain(k: usize, max_n: usize, max_vertices: usize) -> Result<Vec<TensorStep>> {
    let factors = enumerated_graphs(k, max_n)?;
    let size: u128 = factors.iter().map(|g| g.vertex_count() as u128).product();
    guard("vertices in the last product", size, max_vertices as u128)?;
    let mut steps: Vec<TensorStep> = Vec::with_capacity(k);
    for factor in factors {
        let (graph, projection) = match steps.last() {
            None => (factor, None),
            Some(prev) => {
                let m = factor.vertex_count();
                let product = tensor_product(&prev.graph, &factor);
                let map = (0..product.vertex_count()).map(|v| v / m).collect();
                (product, Some(map))
            }
        };
        let coloring = three_color_certificate(&graph);
        steps.push(TensorStep { graph, coloring, projection });
    }
    Ok(steps)
}
