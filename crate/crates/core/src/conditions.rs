//! Height-1 conditions: finite sets of identities `f(x_π) ≈ g(x_ρ)` between
//! single applications of function symbols to variables.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::solver;

/// A function symbol and its arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// One side of an identity: `symbol(x_{args[0]}, .., x_{args[n-1]})`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term {
    pub symbol: String,
    pub args: Vec<usize>,
}

impl Term {
    pub fn new(symbol: impl Into<String>, args: impl Into<Vec<usize>>) -> Self {
        Term { symbol: symbol.into(), args: args.into() }
    }
}

/// `lhs ≈ rhs` over the variables `x_0 .. x_{vars-1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Identity {
    pub vars: usize,
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn new(vars: usize, lhs: Term, rhs: Term) -> Self {
        Identity { vars, lhs, rhs }
    }
}

pub(crate) type IndexedIdentity<'a> = (usize, &'a [usize], usize, &'a [usize], usize);

/// A height-1 condition in normal form: symbols sorted by name, identities
/// sorted and deduplicated. Two conditions are equal iff their normal forms
/// are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ConditionWire")]
pub struct HeightOneCondition {
    symbols: Vec<Symbol>,
    identities: Vec<Identity>,
}

#[derive(Deserialize)]
struct ConditionWire {
    symbols: Vec<Symbol>,
    identities: Vec<Identity>,
}

impl TryFrom<ConditionWire> for HeightOneCondition {
    type Error = Error;

    fn try_from(w: ConditionWire) -> Result<Self> {
        HeightOneCondition::new(w.symbols, w.identities)
    }
}

impl HeightOneCondition {
    /// Validate and normalize.
    pub fn new(
        symbols: impl IntoIterator<Item = Symbol>,
        identities: impl IntoIterator<Item = Identity>,
    ) -> Result<Self> {
        let mut symbols: Vec<Symbol> = symbols.into_iter().collect();
        symbols.sort();
        for w in symbols.windows(2) {
            if w[0].name == w[1].name {
                return Err(Error::InvalidCondition(format!("symbol {} declared twice", w[0].name)));
            }
        }
        if let Some(s) = symbols.iter().find(|s| s.arity == 0) {
            return Err(Error::InvalidCondition(format!("symbol {} has arity 0", s.name)));
        }
        let mut identities: Vec<Identity> = identities.into_iter().collect();
        let out = HeightOneCondition { symbols, identities: Vec::new() };
        for id in &identities {
            for term in [&id.lhs, &id.rhs] {
                let arity = out
                    .symbol(&term.symbol)
                    .ok_or_else(|| Error::InvalidCondition(format!("undeclared symbol {}", term.symbol)))?
                    .arity;
                if term.args.len() != arity {
                    return Err(Error::InvalidCondition(format!(
                        "{} applied to {} arguments, arity {arity}",
                        term.symbol,
                        term.args.len()
                    )));
                }
                if let Some(&a) = term.args.iter().find(|&&a| a >= id.vars) {
                    return Err(Error::InvalidCondition(format!(
                        "variable {a} in an identity over {} variables",
                        id.vars
                    )));
                }
            }
        }
        identities.sort();
        identities.dedup();
        Ok(HeightOneCondition { identities, ..out })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbol_index(name).map(|i| &self.symbols[i])
    }

    /// Position of `name` in the normalized symbol list.
    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.binary_search_by(|s| s.name.as_str().cmp(name)).ok()
    }

    /// Identities as `(lhs symbol index, π, rhs symbol index, ρ, vars)`.
    pub(crate) fn indexed_identities(&self) -> Vec<IndexedIdentity<'_>> {
        self.identities
            .iter()
            .map(|id| {
                let l = self.symbol_index(&id.lhs.symbol).expect("validated");
                let r = self.symbol_index(&id.rhs.symbol).expect("validated");
                (l, id.lhs.args.as_slice(), r, id.rhs.args.as_slice(), id.vars)
            })
            .collect()
    }
}

/// Name of the ternary symbol of vertex `v` in [`sigma_of_graph`].
pub fn vertex_symbol(v: usize) -> String {
    format!("f{v}")
}

/// Name of the 6-ary symbol of edge `{u, v}` (`u <= v`) in [`sigma_of_graph`].
pub fn edge_symbol(u: usize, v: usize) -> String {
    format!("g{u}_{v}")
}

/// The two 6-ary argument patterns over `(x, y, z) = (0, 1, 2)`.
pub const PATTERN_FIRST: [usize; 6] = [0, 1, 0, 2, 1, 2];
pub const PATTERN_SECOND: [usize; 6] = [1, 0, 2, 0, 2, 1];

/// `Σ_G`: a ternary `f_v` per vertex, a 6-ary `g_e` per edge `(u, v)`,
/// `u <= v`, and the identities `f_u(x,y,z) ≈ g_e(x,y,x,z,y,z)` and
/// `f_v(x,y,z) ≈ g_e(y,x,z,x,z,y)`.
pub fn sigma_of_graph(g: &Graph) -> HeightOneCondition {
    let mut symbols: Vec<Symbol> =
        (0..g.vertex_count()).map(|v| Symbol { name: vertex_symbol(v), arity: 3 }).collect();
    let mut identities = Vec::new();
    for &(u, v) in g.edges() {
        let e = edge_symbol(u, v);
        symbols.push(Symbol { name: e.clone(), arity: 6 });
        identities.push(Identity::new(3, Term::new(vertex_symbol(u), [0, 1, 2]), Term::new(&*e, PATTERN_FIRST)));
        identities.push(Identity::new(3, Term::new(vertex_symbol(v), [0, 1, 2]), Term::new(e, PATTERN_SECOND)));
    }
    HeightOneCondition::new(symbols, identities).expect("well-formed by construction")
}

/// The quasi near-unanimity identities of arity `n` over `x = 0`, `y = 1`:
/// `f(y,x,..,x) ≈ f(x,y,x,..,x) ≈ .. ≈ f(x,..,x,y) ≈ f(x,..,x)`.
pub fn sigma_qnu(n: usize) -> Result<HeightOneCondition> {
    if n < 2 {
        return Err(Error::ArityTooSmall { min: 2, got: n });
    }
    let y_at = |k: usize| Term::new("f", (0..n).map(|i| (i == k) as usize).collect::<Vec<_>>());
    let mut identities: Vec<Identity> = (0..n - 1).map(|k| Identity::new(2, y_at(k), y_at(k + 1))).collect();
    identities.push(Identity::new(2, y_at(n - 1), Term::new("f", vec![0; n])));
    HeightOneCondition::new([Symbol { name: "f".into(), arity: n }], identities)
}

/// The Siggers identity `s(x,y,x,z,y,z) ≈ s(y,x,z,x,z,y)`.
pub fn siggers() -> HeightOneCondition {
    HeightOneCondition::new(
        [Symbol { name: "s".into(), arity: 6 }],
        [Identity::new(3, Term::new("s", PATTERN_FIRST), Term::new("s", PATTERN_SECOND))],
    )
    .expect("well-formed")
}

/// An assignment of a coordinate to every symbol: interpreting each symbol
/// as that projection satisfies the condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionWitness {
    pub choice: BTreeMap<String, usize>,
}

impl ProjectionWitness {
    /// Check the witness directly against every identity.
    pub fn validate(&self, c: &HeightOneCondition) -> Result<()> {
        for s in c.symbols() {
            match self.choice.get(&s.name) {
                Some(&i) if i < s.arity => {}
                _ => return Err(Error::InvalidCondition(format!("no valid coordinate for {}", s.name))),
            }
        }
        for id in c.identities() {
            let l = id.lhs.args[self.choice[&id.lhs.symbol]];
            let r = id.rhs.args[self.choice[&id.rhs.symbol]];
            if l != r {
                return Err(Error::InvalidCondition(format!("projections violate {id:?}")));
            }
        }
        Ok(())
    }
}

/// Per symbol: (other symbol, allowed coordinate pairs (mine, theirs)).
type Links = Vec<Vec<(usize, Vec<(usize, usize)>)>>;

/// Decide satisfaction by projections (Label Cover): find a coordinate for
/// every symbol such that `π(choice(lhs)) = ρ(choice(rhs))` in every
/// identity. Symbols are assigned in normalized order with forward checking.
pub fn is_trivial(c: &HeightOneCondition) -> Option<ProjectionWitness> {
    let k = c.symbols().len();
    // domains[s][i]: coordinate i of symbol s still possible.
    let mut domains: Vec<Vec<bool>> = c.symbols().iter().map(|s| vec![true; s.arity]).collect();
    let mut links: Links = vec![Vec::new(); k];
    for (l, pi, r, rho, _) in c.indexed_identities() {
        if l == r {
            for (i, allowed) in domains[l].iter_mut().enumerate() {
                *allowed &= pi[i] == rho[i];
            }
            continue;
        }
        let pairs: Vec<(usize, usize)> = (0..pi.len())
            .flat_map(|i| (0..rho.len()).filter(move |&j| pi[i] == rho[j]).map(move |j| (i, j)))
            .collect();
        links[r].push((l, pairs.iter().map(|&(i, j)| (j, i)).collect()));
        links[l].push((r, pairs));
    }

    let mut choice = vec![usize::MAX; k];
    let mut trail: Vec<(usize, usize)> = Vec::new();
    if assign_from(0, &mut domains, &links, &mut choice, &mut trail) {
        let names = c.symbols().iter().map(|s| s.name.clone());
        Some(ProjectionWitness { choice: names.zip(choice).collect() })
    } else {
        None
    }
}

fn assign_from(
    s: usize,
    domains: &mut [Vec<bool>],
    links: &Links,
    choice: &mut [usize],
    trail: &mut Vec<(usize, usize)>,
) -> bool {
    if s == domains.len() {
        return true;
    }
    for i in 0..domains[s].len() {
        if !domains[s][i] {
            continue;
        }
        choice[s] = i;
        let mark = trail.len();
        let mut consistent = true;
        for (other, pairs) in &links[s] {
            let other = *other;
            if other < s {
                // Already assigned; forward checking has kept it compatible.
                continue;
            }
            let supported: BTreeSet<usize> = pairs.iter().filter(|p| p.0 == i).map(|p| p.1).collect();
            for j in 0..domains[other].len() {
                if domains[other][j] && !supported.contains(&j) {
                    domains[other][j] = false;
                    trail.push((other, j));
                }
            }
            if !domains[other].iter().any(|&b| b) {
                consistent = false;
                break;
            }
        }
        if consistent && assign_from(s + 1, domains, links, choice, trail) {
            return true;
        }
        for (o, j) in trail.drain(mark..) {
            domains[o][j] = true;
        }
    }
    choice[s] = usize::MAX;
    false
}

/// The condition `Δ` implied by both `a` and `b`, and non-trivial when both
/// are. Symbols are pairs `(f,g)` of arity `arity(f) + arity(g)`; every
/// identity of `a` is padded on the right by a fresh shared block for each
/// symbol of `b`, and every identity of `b` is padded on the left by a fresh
/// shared block for each symbol of `a`.
pub fn combine(a: &HeightOneCondition, b: &HeightOneCondition) -> HeightOneCondition {
    let pair = |f: &str, g: &str| format!("({f},{g})");
    let mut symbols = Vec::new();
    for f in a.symbols() {
        for g in b.symbols() {
            symbols.push(Symbol { name: pair(&f.name, &g.name), arity: f.arity + g.arity });
        }
    }
    let mut identities = Vec::new();
    for id in a.identities() {
        for g in b.symbols() {
            let block: Vec<usize> = (id.vars..id.vars + g.arity).collect();
            let side = |t: &Term| Term::new(pair(&t.symbol, &g.name), [t.args.as_slice(), &block].concat());
            identities.push(Identity::new(id.vars + g.arity, side(&id.lhs), side(&id.rhs)));
        }
    }
    for id in b.identities() {
        for f in a.symbols() {
            let block: Vec<usize> = (0..f.arity).collect();
            let side = |t: &Term| {
                let shifted = t.args.iter().map(|&x| x + f.arity);
                Term::new(pair(&f.name, &t.symbol), block.iter().copied().chain(shifted).collect::<Vec<_>>())
            };
            identities.push(Identity::new(f.arity + id.vars, side(&id.lhs), side(&id.rhs)));
        }
    }
    HeightOneCondition::new(symbols, identities).expect("well-formed by construction")
}

/// A homomorphism `g -> h`, which certifies that `Σ_h` implies `Σ_g`.
/// `None` only means this sufficient criterion does not apply.
pub fn implies_via_hom(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    solver::find_hom(g, h)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::graph::tensor_product;
    use crate::solver::three_color;

    /// Oracle: try every coordinate assignment.
    fn trivial_by_enumeration(c: &HeightOneCondition) -> bool {
        let arities: Vec<usize> = c.symbols().iter().map(|s| s.arity).collect();
        let mut choice = vec![0; arities.len()];
        let ids = c.indexed_identities();
        loop {
            if ids.iter().all(|&(l, pi, r, rho, _)| pi[choice[l]] == rho[choice[r]]) {
                return true;
            }
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return false;
                }
                choice[i] += 1;
                if choice[i] < arities[i] {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn sigma_k3_counts_and_projection_witness() {
        let c = sigma_of_graph(&Graph::complete(3));
        assert_eq!(c.symbols().iter().filter(|s| s.arity == 3).count(), 3);
        assert_eq!(c.symbols().iter().filter(|s| s.arity == 6).count(), 3);
        assert_eq!(c.identities().len(), 6);
        let w = is_trivial(&c).unwrap();
        w.validate(&c).unwrap();
        let coords: BTreeSet<usize> = (0..3).map(|v| w.choice[&vertex_symbol(v)]).collect();
        assert_eq!(coords.len(), 3);
    }

    #[test]
    fn loop_gives_siggers_shape() {
        let c = sigma_of_graph(&Graph::loop_vertex());
        assert_eq!(c.symbols().len(), 2);
        assert_eq!(c.identities().len(), 2);
        assert!(is_trivial(&c).is_none());
        assert!(is_trivial(&siggers()).is_none());
    }

    #[test]
    fn edgeless_graph_is_trivial() {
        let c = sigma_of_graph(&Graph::empty(2));
        assert_eq!(c.symbols().len(), 2);
        assert!(c.identities().is_empty());
        assert!(is_trivial(&c).is_some());
    }

    #[test]
    fn commutativity_is_not_trivial() {
        let c = HeightOneCondition::new(
            [Symbol { name: "f".into(), arity: 2 }],
            [Identity::new(2, Term::new("f", [0, 1]), Term::new("f", [1, 0]))],
        )
        .unwrap();
        assert!(is_trivial(&c).is_none());
    }

    #[test]
    fn qnu_conditions() {
        let c = sigma_qnu(2).unwrap();
        assert_eq!(
            c.identities(),
            &[
                Identity::new(2, Term::new("f", [0, 1]), Term::new("f", [0, 0])),
                Identity::new(2, Term::new("f", [1, 0]), Term::new("f", [0, 1])),
            ]
        );
        assert_eq!(sigma_qnu(3).unwrap().identities().len(), 3);
        for n in 2..=8 {
            assert!(is_trivial(&sigma_qnu(n).unwrap()).is_none());
        }
        assert!(sigma_qnu(1).is_err());
    }

    #[test]
    fn validation_errors() {
        let f = || Symbol { name: "f".into(), arity: 2 };
        assert!(HeightOneCondition::new([f(), f()], []).is_err());
        let bad_var = Identity::new(1, Term::new("f", [0, 1]), Term::new("f", [0, 0]));
        assert!(HeightOneCondition::new([f()], [bad_var]).is_err());
        let bad_arity = Identity::new(2, Term::new("f", [0]), Term::new("f", [0, 0]));
        assert!(HeightOneCondition::new([f()], [bad_arity]).is_err());
        let undeclared = Identity::new(2, Term::new("g", [0, 1]), Term::new("f", [0, 0]));
        assert!(HeightOneCondition::new([f()], [undeclared]).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let c = sigma_of_graph(&Graph::complete(3));
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<HeightOneCondition>(&text).unwrap(), c);
        let bad = r#"{"symbols":[{"name":"f","arity":2}],"identities":[{"vars":1,"lhs":{"symbol":"f","args":[0,1]},"rhs":{"symbol":"f","args":[0,0]}}]}"#;
        assert!(serde_json::from_str::<HeightOneCondition>(bad).is_err());
    }

    #[test]
    fn normal_form_ignores_declaration_order() {
        let s = |n: &str| Symbol { name: n.into(), arity: 1 };
        let id = |a: &str, b: &str| Identity::new(1, Term::new(a, [0]), Term::new(b, [0]));
        let x = HeightOneCondition::new([s("b"), s("a")], [id("a", "b"), id("b", "a"), id("a", "b")]).unwrap();
        let y = HeightOneCondition::new([s("a"), s("b")], [id("b", "a"), id("a", "b")]).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn triviality_matches_three_colourability_on_four_vertices() {
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            let g = Graph::new(4, edges).unwrap();
            let c = sigma_of_graph(&g);
            assert_eq!(is_trivial(&c).is_some(), three_color(&g).is_some(), "{g:?}");
        }
    }

    #[test]
    fn combine_counts() {
        let s = siggers();
        let d = combine(&s, &s);
        assert_eq!(d.symbols(), &[Symbol { name: "(s,s)".into(), arity: 12 }]);
        assert_eq!(d.identities().len(), 2);
        assert!(is_trivial(&d).is_none());

        let a = sigma_of_graph(&Graph::loop_vertex());
        let k3 = sigma_of_graph(&Graph::complete(3));
        let d = combine(&a, &k3);
        assert_eq!(d.symbols().len(), a.symbols().len() * k3.symbols().len());
        assert_eq!(
            d.identities().len(),
            a.identities().len() * k3.symbols().len() + k3.identities().len() * a.symbols().len()
        );
        assert!(is_trivial(&d).is_some());
    }

    #[test]
    fn implication_by_homomorphism() {
        assert!(implies_via_hom(&Graph::complete(3), &Graph::complete(4)).is_some());
        assert!(implies_via_hom(&Graph::complete(4), &Graph::complete(3)).is_none());
        let g = Graph::cycle(5);
        let h = Graph::complete(3);
        let map = implies_via_hom(&tensor_product(&g, &h), &g).unwrap();
        assert!(tensor_product(&g, &h).is_homomorphism_to(&g, &map));
    }

    fn arb_condition() -> impl Strategy<Value = HeightOneCondition> {
        let arities = proptest::collection::vec(1usize..=3, 1..=3);
        arities.prop_flat_map(|arities| {
            let k = arities.len();
            let identity = (1usize..=3, 0..k, 0..k).prop_flat_map({
                let arities = arities.clone();
                move |(vars, l, r)| {
                    (
                        Just((vars, l, r)),
                        proptest::collection::vec(0..vars, arities[l]),
                        proptest::collection::vec(0..vars, arities[r]),
                    )
                }
            });
            (Just(arities), proptest::collection::vec(identity, 0..5)).prop_map(|(arities, ids)| {
                let name = |i: usize| format!("s{i}");
                let symbols = arities.iter().enumerate().map(|(i, &a)| Symbol { name: name(i), arity: a });
                let ids = ids
                    .into_iter()
                    .map(|((vars, l, r), pi, rho)| Identity::new(vars, Term::new(name(l), pi), Term::new(name(r), rho)));
                HeightOneCondition::new(symbols, ids).unwrap()
            })
        })
    }

    fn rename(c: &HeightOneCondition, shift: usize) -> HeightOneCondition {
        let ids = c.identities().iter().map(|id| {
            // Rotate the variables of each identity; a permutation of 0..vars.
            let p = |x: usize| (x + shift) % id.vars;
            let t = |t: &Term| Term::new(&*t.symbol, t.args.iter().map(|&x| p(x)).collect::<Vec<_>>());
            Identity::new(id.vars, t(&id.lhs), t(&id.rhs))
        });
        HeightOneCondition::new(c.symbols().to_vec(), ids.collect::<Vec<_>>()).unwrap()
    }

    proptest! {
        #[test]
        fn label_cover_agrees_with_enumeration(c in arb_condition()) {
            let w = is_trivial(&c);
            prop_assert_eq!(w.is_some(), trivial_by_enumeration(&c));
            if let Some(w) = w {
                prop_assert!(w.validate(&c).is_ok());
            }
        }

        #[test]
        fn renaming_variables_preserves_triviality(c in arb_condition(), shift in 0usize..3) {
            prop_assert_eq!(is_trivial(&c).is_some(), is_trivial(&rename(&c, shift)).is_some());
        }

        #[test]
        fn combination_law(a in arb_condition(), b in arb_condition()) {
            let d = combine(&a, &b);
            prop_assert_eq!(
                is_trivial(&d).is_some(),
                is_trivial(&a).is_some() || is_trivial(&b).is_some()
            );
        }
    }
}
