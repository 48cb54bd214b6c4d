//! Finite relational structures, used as templates.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A named relation: a set of tuples of one arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    tuples: Vec<Vec<usize>>,
}

impl Relation {
    /// Tuples in ascending lexicographic order, without duplicates.
    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }
}

/// A finite relational structure on the domain `0..domain_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelStructure {
    domain_size: usize,
    relations: Vec<Relation>,
}

impl RelStructure {
    pub fn new(domain_size: usize) -> Self {
        RelStructure { domain_size, relations: Vec::new() }
    }

    /// Add a relation. Tuples are sorted and deduplicated.
    pub fn with_relation(
        mut self,
        name: impl Into<String>,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self> {
        let name = name.into();
        if self.relations.iter().any(|r| r.name == name) {
            return Err(Error::InvalidStructure(format!("duplicate relation name {name}")));
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::InvalidStructure(format!(
                    "tuple of length {} in {name}, arity {arity}",
                    t.len()
                )));
            }
            if let Some(&bad) = t.iter().find(|&&x| x >= self.domain_size) {
                return Err(Error::InvalidStructure(format!(
                    "element {bad} outside domain of size {}",
                    self.domain_size
                )));
            }
            set.insert(t);
        }
        self.relations.push(Relation { name, arity, tuples: set.into_iter().collect() });
        Ok(self)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// A graph as a template: one binary relation `E` holding both
    /// orientations of every edge.
    pub fn from_graph(g: &Graph) -> Self {
        RelStructure::new(g.vertex_count())
            .with_relation("E", 2, g.arcs().into_iter().map(|(u, v)| vec![u, v]))
            .expect("graph arcs are in range")
    }

    /// `({0,1}; NAE)` with the ternary not-all-equal relation.
    pub fn not_all_equal() -> Self {
        let tuples = (0..8usize)
            .map(|i| vec![i >> 2 & 1, i >> 1 & 1, i & 1])
            .filter(|t| !(t[0] == t[1] && t[1] == t[2]));
        RelStructure::new(2).with_relation("NAE", 3, tuples).expect("valid")
    }

    /// `({0,1}; <=, {0}, {1})`.
    pub fn order_with_constants() -> Self {
        RelStructure::new(2)
            .with_relation("LE", 2, [vec![0, 0], vec![0, 1], vec![1, 1]])
            .and_then(|s| s.with_relation("ZERO", 1, [vec![0]]))
            .and_then(|s| s.with_relation("ONE", 1, [vec![1]]))
            .expect("valid")
    }

    /// The one-element structure with a looped binary relation.
    pub fn one_element() -> Self {
        RelStructure::from_graph(&Graph::loop_vertex())
    }

    /// Whether every tuple's entries are pairwise distinct.
    pub fn tuples_injective(&self) -> bool {
        self.relations.iter().flat_map(|r| r.tuples.iter()).all(|t| {
            let set: BTreeSet<_> = t.iter().collect();
            set.len() == t.len()
        })
    }
}

/// The Gaifman graph: elements are adjacent when they occur together in a tuple.
pub fn gaifman_graph(s: &RelStructure) -> Graph {
    let mut edges = BTreeSet::new();
    for t in s.relations.iter().flat_map(|r| r.tuples.iter()) {
        for (i, &a) in t.iter().enumerate() {
            for &b in &t[i + 1..] {
                if a != b {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    Graph::new(s.domain_size, edges).expect("elements are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_template_has_both_orientations() {
        let s = RelStructure::from_graph(&Graph::complete(3));
        assert_eq!(s.relations()[0].tuples().len(), 6);
        assert!(s.relations()[0].contains(&[2, 0]));
    }

    #[test]
    fn invalid_tuples_rejected() {
        assert!(RelStructure::new(2).with_relation("R", 2, [vec![0, 2]]).is_err());
        assert!(RelStructure::new(2).with_relation("R", 2, [vec![0]]).is_err());
        let s = RelStructure::new(1).with_relation("R", 1, [vec![0]]).unwrap();
        assert!(s.with_relation("R", 1, [vec![0]]).is_err());
    }

    #[test]
    fn nae_has_six_tuples() {
        assert_eq!(RelStructure::not_all_equal().relations()[0].tuples().len(), 6);
    }
}
