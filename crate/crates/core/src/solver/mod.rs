//! A finite-domain constraint solver: table constraints, generalized arc
//! consistency, and depth-first search choosing the variable with the
//! smallest remaining domain (lowest index on ties) and values in ascending
//! order.
//!
//! Satisfiable answers carry the full assignment, which [`replay`] checks
//! without using any of the search code. Unsatisfiable answers carry only
//! the digest of the refuted instance.

mod engine;
pub mod replay;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub use engine::SolveOptions;

/// Index of a relation inside a [`CspInstance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId(pub usize);

/// A set of allowed tuples of one arity, sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleSet {
    arity: usize,
    flat: Vec<usize>,
}

impl TupleSet {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.flat.chunks(self.arity)
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        let k = self.arity;
        let n = self.flat.len() / k;
        let (mut lo, mut hi) = (0, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.flat[mid * k..mid * k + k].cmp(t) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// A finite-domain CSP: variables `0..var_count` over values
/// `0..domain_size`, table constraints on shared relations, and variable
/// equalities.
#[derive(Clone, Debug, Default)]
pub struct CspInstance {
    var_count: usize,
    domain_size: usize,
    relations: Vec<TupleSet>,
    // Scopes of all constraints, concatenated; constraint i spans
    // scopes[starts[i]..starts[i] + arity of its relation].
    scopes: Vec<u32>,
    starts: Vec<usize>,
    constraint_relations: Vec<RelationId>,
    equalities: Vec<(usize, usize)>,
}

impl CspInstance {
    pub fn new(var_count: usize, domain_size: usize) -> Result<Self> {
        if var_count > u32::MAX as usize {
            return Err(Error::InvalidInstance("too many variables".into()));
        }
        Ok(CspInstance { var_count, domain_size, ..Default::default() })
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// Register a relation; tuples are validated, sorted and deduplicated.
    pub fn add_relation<T: AsRef<[usize]>>(
        &mut self,
        arity: usize,
        tuples: impl IntoIterator<Item = T>,
    ) -> Result<RelationId> {
        if arity == 0 {
            return Err(Error::InvalidInstance("relations must have positive arity".into()));
        }
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity {
                return Err(Error::InvalidInstance(format!(
                    "tuple of length {} for arity {arity}",
                    t.len()
                )));
            }
            if t.iter().any(|&v| v >= self.domain_size) {
                return Err(Error::InvalidInstance(format!("tuple {t:?} outside the domain")));
            }
            rows.push(t.to_vec());
        }
        rows.sort_unstable();
        rows.dedup();
        self.relations.push(TupleSet { arity, flat: rows.concat() });
        Ok(RelationId(self.relations.len() - 1))
    }

    /// Require `scope` to take a value tuple from `relation`.
    pub fn add_constraint(&mut self, scope: &[usize], relation: RelationId) -> Result<()> {
        let rel = self
            .relations
            .get(relation.0)
            .ok_or_else(|| Error::InvalidInstance(format!("unknown relation {}", relation.0)))?;
        if scope.len() != rel.arity {
            return Err(Error::InvalidInstance(format!(
                "scope of length {} for a relation of arity {}",
                scope.len(),
                rel.arity
            )));
        }
        if let Some(&v) = scope.iter().find(|&&v| v >= self.var_count) {
            return Err(Error::InvalidInstance(format!("variable {v} out of range")));
        }
        self.starts.push(self.scopes.len());
        self.scopes.extend(scope.iter().map(|&v| v as u32));
        self.constraint_relations.push(relation);
        Ok(())
    }

    /// Require variables `a` and `b` to take the same value.
    pub fn add_equality(&mut self, a: usize, b: usize) -> Result<()> {
        if a >= self.var_count || b >= self.var_count {
            return Err(Error::InvalidInstance(format!("equality ({a}, {b}) out of range")));
        }
        self.equalities.push((a, b));
        Ok(())
    }

    /// Pin `var` to `value` with a unary constraint.
    pub fn pin(&mut self, var: usize, value: usize) -> Result<()> {
        let rel = self.add_relation(1, [[value]])?;
        self.add_constraint(&[var], rel)
    }

    pub fn relation(&self, id: RelationId) -> &TupleSet {
        &self.relations[id.0]
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.starts.len()
    }

    /// Scope and relation of constraint `i`.
    pub fn constraint(&self, i: usize) -> (Vec<usize>, RelationId) {
        let rel = self.constraint_relations[i];
        let start = self.starts[i];
        let arity = self.relations[rel.0].arity;
        (self.scopes[start..start + arity].iter().map(|&v| v as usize).collect(), rel)
    }

    pub(crate) fn raw_scope(&self, i: usize) -> &[u32] {
        let rel = self.constraint_relations[i];
        let start = self.starts[i];
        &self.scopes[start..start + self.relations[rel.0].arity]
    }

    pub(crate) fn raw_relation(&self, i: usize) -> RelationId {
        self.constraint_relations[i]
    }

    pub fn equalities(&self) -> &[(usize, usize)] {
        &self.equalities
    }

    /// SHA-256 over a canonical encoding of the instance, hex encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        let mut word = |x: usize| h.update((x as u64).to_le_bytes());
        word(self.var_count);
        word(self.domain_size);
        word(self.relations.len());
        for r in &self.relations {
            word(r.arity);
            word(r.flat.len());
            r.flat.iter().for_each(|&x| word(x));
        }
        word(self.starts.len());
        for i in 0..self.starts.len() {
            word(self.constraint_relations[i].0);
            self.raw_scope(i).iter().for_each(|&v| word(v as usize));
        }
        word(self.equalities.len());
        for &(a, b) in &self.equalities {
            word(a);
            word(b);
        }
        hex::encode(h.finalize())
    }
}

/// Outcome of a search, in a form that can be re-validated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A total assignment to the instance's variables.
    Assignment { values: Vec<usize> },
    /// A vertex map between graphs.
    Homomorphism { map: Vec<usize> },
    /// A proper colouring.
    Coloring { colors: Vec<usize> },
    /// Complete search found no solution of the instance with this digest.
    Exhausted { digest: String },
}

impl Certificate {
    pub fn is_exhausted(&self) -> bool {
        matches!(self, Certificate::Exhausted { .. })
    }

    /// The payload of an assignment-like certificate.
    pub fn values(&self) -> Option<&[usize]> {
        match self {
            Certificate::Assignment { values } => Some(values),
            Certificate::Homomorphism { map } => Some(map),
            Certificate::Coloring { colors } => Some(colors),
            Certificate::Exhausted { .. } => None,
        }
    }
}

/// Solve with default options.
pub fn solve(instance: &CspInstance) -> Certificate {
    solve_with(instance, &SolveOptions::default())
}

/// Solve with explicit options.
pub fn solve_with(instance: &CspInstance, options: &SolveOptions) -> Certificate {
    match engine::search(instance, options) {
        Some(values) => Certificate::Assignment { values },
        None => Certificate::Exhausted { digest: instance.digest() },
    }
}

/// The CSP whose solutions are the homomorphisms `g -> h`.
pub fn hom_instance(g: &Graph, h: &Graph) -> CspInstance {
    let mut csp = CspInstance::new(g.vertex_count(), h.vertex_count()).expect("vertex count fits");
    let rel = csp.add_relation(2, h.arcs().iter().map(|&(a, b)| [a, b])).expect("arcs in range");
    for &(u, v) in g.edges() {
        csp.add_constraint(&[u, v], rel).expect("edge in range");
    }
    csp
}

/// A homomorphism `g -> h`, or `None` after exhaustive search.
pub fn find_hom(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    let options = SolveOptions {
        interchangeable_values: is_complete_loopless(h),
        ..SolveOptions::default()
    };
    engine::search(&hom_instance(g, h), &options)
}

fn is_complete_loopless(h: &Graph) -> bool {
    let n = h.vertex_count();
    !h.has_loops() && h.edge_count() == n * n.saturating_sub(1) / 2
}

/// A proper 3-colouring of `g` (a homomorphism to `K3`), if one exists.
pub fn three_color(g: &Graph) -> Option<Vec<usize>> {
    find_hom(g, &Graph::complete(3))
}

/// [`three_color`] packaged as a certificate: a colouring, or the digest of
/// the refuted colouring instance.
pub fn three_color_certificate(g: &Graph) -> Certificate {
    match three_color(g) {
        Some(colors) => Certificate::Coloring { colors },
        None => Certificate::Exhausted { digest: hom_instance(g, &Graph::complete(3)).digest() },
    }
}

/// [`find_hom`] packaged as a certificate.
pub fn hom_certificate(g: &Graph, h: &Graph) -> Certificate {
    match find_hom(g, h) {
        Some(map) => Certificate::Homomorphism { map },
        None => Certificate::Exhausted { digest: hom_instance(g, h).digest() },
    }
}

#[cfg(test)]
mod tests;
