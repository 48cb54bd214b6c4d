//! Certificate replay. Nothing here touches the search engine: every check
//! is a direct evaluation of the definitions.

use super::CspInstance;
use crate::graph::Graph;

/// Why an assignment fails to satisfy an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    WrongLength { expected: usize, got: usize },
    ValueOutOfDomain { var: usize, value: usize },
    Constraint { index: usize },
    Equality { a: usize, b: usize },
}

/// Check `values` against every constraint and equality of `instance`.
pub fn check_assignment(instance: &CspInstance, values: &[usize]) -> Result<(), Violation> {
    if values.len() != instance.var_count() {
        return Err(Violation::WrongLength { expected: instance.var_count(), got: values.len() });
    }
    if let Some((var, &value)) = values.iter().enumerate().find(|(_, &x)| x >= instance.domain_size()) {
        return Err(Violation::ValueOutOfDomain { var, value });
    }
    for index in 0..instance.constraint_count() {
        let (scope, rel) = instance.constraint(index);
        let image: Vec<usize> = scope.iter().map(|&v| values[v]).collect();
        if !instance.relation(rel).contains(&image) {
            return Err(Violation::Constraint { index });
        }
    }
    for &(a, b) in instance.equalities() {
        if values[a] != values[b] {
            return Err(Violation::Equality { a, b });
        }
    }
    Ok(())
}

/// Whether `map` is a graph homomorphism `g -> h`.
pub fn check_homomorphism(g: &Graph, h: &Graph, map: &[usize]) -> bool {
    map.len() == g.vertex_count()
        && map.iter().all(|&x| x < h.vertex_count())
        && g.edges().iter().all(|&(u, v)| h.has_edge(map[u], map[v]))
}

/// Whether `colors` is a proper colouring of `g` with colours `0..k`.
pub fn check_coloring(g: &Graph, colors: &[usize], k: usize) -> bool {
    colors.len() == g.vertex_count()
        && colors.iter().all(|&c| c < k)
        && g.edges().iter().all(|&(u, v)| colors[u] != colors[v])
}
