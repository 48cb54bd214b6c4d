//! Satisfaction of height-1 conditions by polymorphisms of finite templates.
//!
//! `satisfies` builds the indicator CSP: one variable per symbol and input
//! tuple, equalities from the identities, and table constraints forcing every
//! symbol to be a polymorphism. The F-graph of a template has the ternary
//! polymorphisms as vertices; its 3-colourings are exactly the minion
//! homomorphisms from the polymorphism clone to the projections.

use std::collections::BTreeMap;

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{edge_symbol, vertex_symbol, HeightOneCondition, Identity, Symbol, PATTERN_FIRST, PATTERN_SECOND};
use crate::error::{guard, Error, Result};
use crate::graph::{qnu_quotient, ClassMap, Graph};
use crate::solver::{self, CspInstance};
use crate::structure::RelStructure;
use crate::tuples;

/// A total operation `domain^arity -> domain`, stored as the list of values
/// in mixed-radix input order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FunctionTable {
    pub arity: usize,
    pub domain_size: usize,
    pub values: Vec<usize>,
}

impl FunctionTable {
    pub fn new(arity: usize, domain_size: usize, values: Vec<usize>) -> Result<Self> {
        let expected = tuples::count(domain_size, arity)
            .ok_or_else(|| Error::InvalidStructure("function table too large".into()))?;
        if values.len() != expected || values.iter().any(|&v| v >= domain_size) {
            return Err(Error::InvalidStructure(format!(
                "table of {} values for arity {arity} over {domain_size} elements",
                values.len()
            )));
        }
        Ok(FunctionTable { arity, domain_size, values })
    }

    /// The `i`-th projection of the given arity.
    pub fn projection(arity: usize, domain_size: usize, i: usize) -> Self {
        let size = tuples::count(domain_size, arity).expect("small table");
        let values = (0..size).map(|t| tuples::decode(t, domain_size, arity)[i]).collect();
        FunctionTable { arity, domain_size, values }
    }

    pub fn eval(&self, args: &[usize]) -> usize {
        self.values[tuples::encode(args, self.domain_size)]
    }

    /// `x ↦ self(x[perm[0]], .., x[perm[arity-1]])`.
    pub fn permute_args(&self, perm: &[usize]) -> Self {
        let values = (0..self.values.len())
            .map(|t| {
                let x = tuples::decode(t, self.domain_size, self.arity);
                self.eval(&perm.iter().map(|&p| x[p]).collect::<Vec<_>>())
            })
            .collect();
        FunctionTable { values, ..self.clone() }
    }
}

/// Whether `f` preserves every relation of `b`, checked by applying it to
/// every `arity`-tuple of tuples of each relation.
pub fn is_polymorphism(b: &RelStructure, f: &FunctionTable) -> bool {
    if f.domain_size != b.domain_size() {
        return false;
    }
    b.relations().iter().all(|r| {
        let rows = r.tuples();
        if rows.is_empty() {
            return true;
        }
        let mut pick = vec![0usize; f.arity];
        let mut image = vec![0usize; r.arity];
        let mut args = vec![0usize; f.arity];
        loop {
            for (i, slot) in image.iter_mut().enumerate() {
                for (j, &p) in pick.iter().enumerate() {
                    args[j] = rows[p][i];
                }
                *slot = f.eval(&args);
            }
            if !r.contains(&image) {
                return false;
            }
            if !tuples::advance(&mut pick, rows.len()) {
                return true;
            }
        }
    })
}

/// Whether the tables interpret every symbol of `c` and satisfy each
/// identity under every assignment of its variables.
pub fn identities_hold(c: &HeightOneCondition, tables: &BTreeMap<String, FunctionTable>) -> bool {
    let d = match tables.values().next() {
        Some(t) => t.domain_size,
        None => return c.symbols().is_empty(),
    };
    let symbols_ok = c.symbols().iter().all(|s| {
        tables.get(&s.name).is_some_and(|t| t.arity == s.arity && t.domain_size == d)
    });
    symbols_ok && c.identities().iter().all(|id| identity_holds(id, tables, d))
}

fn identity_holds(id: &Identity, tables: &BTreeMap<String, FunctionTable>, d: usize) -> bool {
    let (f, g) = (&tables[&id.lhs.symbol], &tables[&id.rhs.symbol]);
    let mut a = vec![0usize; id.vars];
    loop {
        let l: Vec<usize> = id.lhs.args.iter().map(|&i| a[i]).collect();
        let r: Vec<usize> = id.rhs.args.iter().map(|&i| a[i]).collect();
        if f.eval(&l) != g.eval(&r) {
            return false;
        }
        if !tuples::advance(&mut a, d) {
            return true;
        }
    }
}

/// Check a satisfaction witness: every table is a polymorphism of `b` and the
/// identities of `c` hold.
pub fn validate_tables(
    b: &RelStructure,
    c: &HeightOneCondition,
    tables: &BTreeMap<String, FunctionTable>,
) -> Result<()> {
    if let Some((name, _)) = tables.iter().find(|(_, t)| !is_polymorphism(b, t)) {
        return Err(Error::InvalidStructure(format!("{name} is not a polymorphism")));
    }
    if !identities_hold(c, tables) {
        return Err(Error::InvalidCondition("identities fail on the given tables".into()));
    }
    Ok(())
}

/// Caps on the size of indicator instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndicatorLimits {
    pub max_vars: u128,
    pub max_constraints: u128,
}

impl Default for IndicatorLimits {
    fn default() -> Self {
        IndicatorLimits { max_vars: 1 << 22, max_constraints: 8_000_000 }
    }
}

/// The indicator CSP of a template and a condition, with its variable layout.
#[derive(Clone, Debug)]
pub struct Indicator {
    pub instance: CspInstance,
    symbols: Vec<Symbol>,
    offsets: Vec<usize>,
    domain_size: usize,
}

impl Indicator {
    /// The variable standing for `symbol(args)`.
    pub fn var(&self, symbol: usize, args: &[usize]) -> usize {
        self.offsets[symbol] + tuples::encode(args, self.domain_size)
    }

    /// Read the tables off a solution.
    pub fn tables(&self, values: &[usize]) -> BTreeMap<String, FunctionTable> {
        self.symbols
            .iter()
            .zip(&self.offsets)
            .map(|(s, &o)| {
                let size = tuples::count(self.domain_size, s.arity).expect("checked when built");
                let t = FunctionTable { arity: s.arity, domain_size: self.domain_size, values: values[o..o + size].to_vec() };
                (s.name.clone(), t)
            })
            .collect()
    }
}

/// Size of the indicator instance as `(variables, constraints)`, computed
/// without building it.
pub fn indicator_size(b: &RelStructure, c: &HeightOneCondition) -> (u128, u128) {
    let d = b.domain_size() as u128;
    let pow = |x: u128, e: usize| x.checked_pow(e as u32).unwrap_or(u128::MAX);
    let vars = c.symbols().iter().fold(0u128, |acc, s| acc.saturating_add(pow(d, s.arity)));
    let mut cons = c.identities().iter().fold(0u128, |acc, id| acc.saturating_add(pow(d, id.vars)));
    for s in c.symbols() {
        for r in b.relations() {
            cons = cons.saturating_add(pow(r.tuples().len() as u128, s.arity));
        }
    }
    (vars, cons)
}

/// Build the indicator CSP of `b` and `c`.
pub fn indicator_instance(b: &RelStructure, c: &HeightOneCondition, limits: &IndicatorLimits) -> Result<Indicator> {
    let d = b.domain_size();
    if d == 0 {
        return Err(Error::InvalidStructure("template has an empty domain".into()));
    }
    let (vars, cons) = indicator_size(b, c);
    guard("indicator variables", vars, limits.max_vars)?;
    guard("indicator constraints", cons, limits.max_constraints)?;
    debug!("indicator instance: {vars} variables, {cons} constraints");

    let mut offsets = Vec::with_capacity(c.symbols().len());
    let mut total = 0usize;
    for s in c.symbols() {
        offsets.push(total);
        total += tuples::count(d, s.arity).expect("guarded");
    }
    let mut csp = CspInstance::new(total, d)?;
    let relations: Vec<_> = b
        .relations()
        .iter()
        .map(|r| csp.add_relation(r.arity, r.tuples()))
        .collect::<Result<_>>()?;
    let ind = Indicator { instance: CspInstance::default(), symbols: c.symbols().to_vec(), offsets, domain_size: d };

    for (l, pi, r, rho, r_vars) in c.indexed_identities() {
        let mut a = vec![0usize; r_vars];
        let mut lhs = vec![0; pi.len()];
        let mut rhs = vec![0; rho.len()];
        loop {
            lhs.iter_mut().zip(pi).for_each(|(x, &i)| *x = a[i]);
            rhs.iter_mut().zip(rho).for_each(|(x, &i)| *x = a[i]);
            let (u, v) = (ind.var(l, &lhs), ind.var(r, &rhs));
            if u != v {
                csp.add_equality(u, v)?;
            }
            if !tuples::advance(&mut a, d) {
                break;
            }
        }
    }

    for (s, sym) in c.symbols().iter().enumerate() {
        for (rel, &id) in b.relations().iter().zip(&relations) {
            let rows = rel.tuples();
            if rows.is_empty() {
                // Nothing to preserve; an empty relation is preserved by every map.
                continue;
            }
            let mut pick = vec![0usize; sym.arity];
            let mut scope = vec![0usize; rel.arity];
            loop {
                for (i, slot) in scope.iter_mut().enumerate() {
                    let index = pick.iter().fold(0, |acc, &p| acc * d + rows[p][i]);
                    *slot = ind.offsets[s] + index;
                }
                csp.add_constraint(&scope, id)?;
                if !tuples::advance(&mut pick, rows.len()) {
                    break;
                }
            }
        }
    }
    Ok(Indicator { instance: csp, ..ind })
}

/// Outcome of [`satisfies`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Satisfaction {
    /// Polymorphisms interpreting every symbol.
    Satisfied { tables: BTreeMap<String, FunctionTable> },
    /// The indicator instance with this digest has no solution.
    Exhausted { digest: String },
}

impl Satisfaction {
    pub fn tables(&self) -> Option<&BTreeMap<String, FunctionTable>> {
        match self {
            Satisfaction::Satisfied { tables } => Some(tables),
            Satisfaction::Exhausted { .. } => None,
        }
    }
}

/// Decide whether the polymorphism clone of `b` satisfies `c`.
pub fn satisfies(b: &RelStructure, c: &HeightOneCondition) -> Result<Satisfaction> {
    satisfies_with(b, c, &IndicatorLimits::default())
}

/// [`satisfies`] with explicit size caps.
pub fn satisfies_with(b: &RelStructure, c: &HeightOneCondition, limits: &IndicatorLimits) -> Result<Satisfaction> {
    let ind = indicator_instance(b, c, limits)?;
    let cert = solver::solve(&ind.instance);
    Ok(match cert.values() {
        Some(values) => Satisfaction::Satisfied { tables: ind.tables(values) },
        None => Satisfaction::Exhausted { digest: ind.instance.digest() },
    })
}

/// From polymorphisms of a graph `h` satisfying `Σ_g`, the homomorphism
/// `g -> h` sending `v` to `f_v(t0, t1, t2)` for a triangle `t` of `h`.
pub fn homomorphism_from_witness(
    g: &Graph,
    h: &Graph,
    tables: &BTreeMap<String, FunctionTable>,
    triangle: [usize; 3],
) -> Result<Vec<usize>> {
    let [a, b, c] = triangle;
    if !(h.has_edge(a, b) && h.has_edge(b, c) && h.has_edge(a, c)) || a == b || b == c || a == c {
        return Err(Error::InvalidStructure(format!("{triangle:?} is not a triangle")));
    }
    (0..g.vertex_count())
        .map(|v| {
            tables
                .get(&vertex_symbol(v))
                .map(|f| f.eval(&triangle))
                .ok_or_else(|| Error::InvalidCondition(format!("no table for {}", vertex_symbol(v))))
        })
        .collect()
}

/// Some triangle of `h`, lexicographically first.
pub fn find_triangle(h: &Graph) -> Option<[usize; 3]> {
    let n = h.vertex_count();
    (0..n).find_map(|a| {
        (a + 1..n).filter(|&b| h.has_edge(a, b)).find_map(|b| {
            (b + 1..n).find(|&c| h.has_edge(a, c) && h.has_edge(b, c)).map(|c| [a, b, c])
        })
    })
}

/// The argument swap `(x1 x2)(x3 x4)(x5 x6)`, which exchanges the two
/// 6-ary patterns.
pub const SWAP_PAIRS: [usize; 6] = [1, 0, 3, 2, 5, 4];

/// Pull a witness for `Σ_h` back along a homomorphism `map: g -> h` to a
/// witness for `Σ_g`: `f_v` becomes `f_{map(v)}`, and an edge whose image is
/// reversed takes the image edge's table with swapped arguments.
pub fn transfer_witness(
    g: &Graph,
    h: &Graph,
    map: &[usize],
    tables: &BTreeMap<String, FunctionTable>,
) -> Result<BTreeMap<String, FunctionTable>> {
    if !g.is_homomorphism_to(h, map) {
        return Err(Error::InvalidStructure("map is not a homomorphism".into()));
    }
    let get = |name: String| {
        tables.get(&name).cloned().ok_or_else(|| Error::InvalidCondition(format!("no table for {name}")))
    };
    let mut out = BTreeMap::new();
    for v in 0..g.vertex_count() {
        out.insert(vertex_symbol(v), get(vertex_symbol(map[v]))?);
    }
    for &(u, v) in g.edges() {
        let (a, b) = (map[u], map[v]);
        let t = if a <= b { get(edge_symbol(a, b))? } else { get(edge_symbol(b, a))?.permute_args(&SWAP_PAIRS) };
        out.insert(edge_symbol(u, v), t);
    }
    Ok(out)
}

/// The F-graph of a template: ternary polymorphisms as vertices, and an edge
/// `(f1, f2)` whenever a 6-ary polymorphism `g` has `g(x,y,x,z,y,z) = f1`
/// and `g(y,x,z,x,z,y) = f2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FGraph {
    pub vertices: Vec<FunctionTable>,
    /// `(i, j, g)` with `i <= j`; the reverse edge uses [`FGraph::reverse_witness`].
    pub edges: Vec<(usize, usize, FunctionTable)>,
}

impl FGraph {
    pub fn graph(&self) -> Graph {
        Graph::new(self.vertices.len(), self.edges.iter().map(|e| (e.0, e.1))).expect("indices in range")
    }

    /// A witness for `(f2, f1)` from a witness for `(f1, f2)`.
    pub fn reverse_witness(g: &FunctionTable) -> FunctionTable {
        g.permute_args(&SWAP_PAIRS)
    }
}

/// Whether `g` witnesses the F-edge `(f1, f2)` in template `b`.
pub fn is_f_edge_witness(b: &RelStructure, f1: &FunctionTable, f2: &FunctionTable, g: &FunctionTable) -> bool {
    let d = b.domain_size();
    g.arity == 6
        && is_polymorphism(b, g)
        && (0..d * d * d).all(|t| {
            let x = tuples::decode(t, d, 3);
            let first: Vec<usize> = PATTERN_FIRST.iter().map(|&i| x[i]).collect();
            let second: Vec<usize> = PATTERN_SECOND.iter().map(|&i| x[i]).collect();
            g.eval(&first) == f1.eval(&x) && g.eval(&second) == f2.eval(&x)
        })
}

/// Search for a 6-ary polymorphism witnessing the F-edge `(f1, f2)`.
pub fn f_edge_witness(b: &RelStructure, f1: &FunctionTable, f2: &FunctionTable) -> Result<Option<FunctionTable>> {
    let d = b.domain_size();
    let one = HeightOneCondition::new([Symbol { name: "g".into(), arity: 6 }], [])?;
    let mut ind = indicator_instance(b, &one, &IndicatorLimits { max_vars: u128::MAX, max_constraints: u128::MAX })?;
    let mut pins: BTreeMap<usize, usize> = BTreeMap::new();
    for t in 0..d * d * d {
        let x = tuples::decode(t, d, 3);
        for (pattern, f) in [(&PATTERN_FIRST, f1), (&PATTERN_SECOND, f2)] {
            let cell = tuples::encode(&pattern.map(|i| x[i]), d);
            let value = f.eval(&x);
            if *pins.entry(cell).or_insert(value) != value {
                // The patterns meet on constant triples; there f1 and f2 must agree.
                return Ok(None);
            }
        }
    }
    for (&cell, &value) in &pins {
        ind.instance.pin(cell, value)?;
    }
    Ok(solver::solve(&ind.instance).values().map(|v| ind.tables(v).remove("g").expect("single symbol")))
}

/// Default cap on the template domain for [`build_f_graph`].
pub const DEFAULT_F_GRAPH_DOMAIN: usize = 2;

/// Build the F-graph of `b`. Templates with more than `max_domain` elements
/// are refused, since all `d^(d^3)` ternary tables are enumerated.
pub fn build_f_graph(b: &RelStructure, max_domain: usize) -> Result<FGraph> {
    let d = b.domain_size();
    let cells = d * d * d;
    if d > max_domain {
        let estimate = (d as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
        let cap = (max_domain as u128).checked_pow((max_domain.pow(3)) as u32).unwrap_or(u128::MAX);
        return Err(Error::ResourceGuard { what: "ternary tables to enumerate", estimate, cap });
    }
    let mut vertices = Vec::new();
    let mut values = vec![0usize; cells];
    loop {
        let f = FunctionTable { arity: 3, domain_size: d, values: values.clone() };
        if is_polymorphism(b, &f) {
            vertices.push(f);
        }
        if d == 0 || !tuples::advance(&mut values, d) {
            break;
        }
    }
    info!("F-graph: {} ternary polymorphisms", vertices.len());
    let pairs: Vec<(usize, usize)> =
        (0..vertices.len()).flat_map(|i| (i..vertices.len()).map(move |j| (i, j))).collect();
    let found: Vec<Option<(usize, usize, FunctionTable)>> = pairs
        .par_iter()
        .map(|&(i, j)| Ok(f_edge_witness(b, &vertices[i], &vertices[j])?.map(|g| (i, j, g))))
        .collect::<Result<_>>()?;
    let mut edges: Vec<_> = found.into_iter().flatten().collect();
    edges.sort_by_key(|e| (e.0, e.1));
    Ok(FGraph { vertices, edges })
}

/// Decide whether the polymorphism clone of `b` has a minion homomorphism to
/// the projections: a 3-colouring of its F-graph, or `None`.
pub fn minion_hom_to_p(b: &RelStructure, max_domain: usize) -> Result<(FGraph, Option<Vec<usize>>)> {
    let f = build_f_graph(b, max_domain)?;
    let coloring = solver::three_color(&f.graph());
    Ok((f, coloring))
}

/// Result of [`qnu_quotient_check`].
#[derive(Clone, Debug)]
pub struct QnuCheck {
    pub quotient: Graph,
    pub classes: ClassMap,
    /// A homomorphism from the pattern graph to the quotient, if any.
    pub map: Option<Vec<usize>>,
}

/// Default cap on `|V(h)|^n` for [`qnu_quotient_check`].
pub const DEFAULT_MAX_TUPLES: u128 = 1 << 24;

/// Factor `h^n` by the quasi near-unanimity identifications and search for a
/// homomorphism from the connected loopless graph `g` into the quotient.
pub fn qnu_quotient_check(g: &Graph, h: &Graph, n: usize, max_tuples: u128) -> Result<QnuCheck> {
    if g.has_loops() {
        return Err(Error::HasLoops);
    }
    if !g.is_connected() {
        return Err(Error::InvalidStructure("pattern graph must be connected".into()));
    }
    let estimate = (h.vertex_count() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    guard("tuples of the power", estimate, max_tuples)?;
    let (quotient, classes) = qnu_quotient(h, n)?;
    debug!("quotient has {} classes", classes.class_count());
    let map = solver::find_hom(g, &quotient);
    Ok(QnuCheck { quotient, classes, map })
}
