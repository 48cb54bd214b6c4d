//! Gadgets: graphs with marked vertices `x, x', y, y'` and a marked edge `d`
//! such that
//!
//! * (P1) every 3-colouring has `c(x) != c(x')` or `c(y) != c(y')`, not both;
//! * (P2) every boundary colouring with exactly one of these inequalities
//!   extends to a 3-colouring;
//! * (P3) every boundary colouring with `c(x) = c(x')` and `c(y) = c(y')`
//!   extends to a 3-colouring of the graph without `d`.

use log::{debug, info};
use serde::{Deserialize, Serialize};

use super::for_each_coloring;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::solver::{self, hom_instance, CspInstance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub graph: Graph,
    /// `[x, x', y, y']`.
    pub marks: [usize; 4],
    pub d: (usize, usize),
}

impl Gadget {
    /// Check the shape: distinct marks, `d` an edge, `{x, x'}` and
    /// `{y, y'}` non-edges. The colouring properties are checked by
    /// [`verify_gadget`].
    pub fn new(graph: Graph, marks: [usize; 4], d: (usize, usize)) -> Result<Self> {
        let n = graph.vertex_count();
        if let Some(&m) = marks.iter().find(|&&m| m >= n) {
            return Err(Error::VertexOutOfRange { vertex: m, n });
        }
        if (0..4).any(|i| (i + 1..4).any(|j| marks[i] == marks[j])) {
            return Err(Error::InvalidGadget("marked vertices must be distinct".into()));
        }
        if d.0 >= n || d.1 >= n || !graph.has_edge(d.0, d.1) {
            return Err(Error::InvalidGadget(format!("d = {d:?} is not an edge")));
        }
        if graph.has_edge(marks[0], marks[1]) || graph.has_edge(marks[2], marks[3]) {
            return Err(Error::InvalidGadget("marked pairs must be non-edges".into()));
        }
        let d = (d.0.min(d.1), d.0.max(d.1));
        Ok(Gadget { graph, marks, d })
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }
}

/// All 81 colourings of the marks, as `[c(x), c(x'), c(y), c(y')]`.
pub fn boundary_maps() -> impl Iterator<Item = [usize; 4]> {
    (0..81).map(|i| [i / 27, i / 9 % 3, i / 3 % 3, i % 3])
}

/// Boundary maps with exactly one of `c(x) != c(x')`, `c(y) != c(y')`.
pub fn one_inequality_boundaries() -> impl Iterator<Item = [usize; 4]> {
    boundary_maps().filter(|b| (b[0] != b[1]) != (b[2] != b[3]))
}

/// Boundary maps with `c(x) = c(x')` and `c(y) = c(y')`.
pub fn equal_boundaries() -> impl Iterator<Item = [usize; 4]> {
    boundary_maps().filter(|b| b[0] == b[1] && b[2] == b[3])
}

/// A 3-colouring of `g` agreeing with `boundary` on `marks`.
pub fn extend_boundary(g: &Graph, marks: [usize; 4], boundary: [usize; 4]) -> Option<Vec<usize>> {
    let mut csp = hom_instance(g, &Graph::complete(3));
    for (m, c) in marks.into_iter().zip(boundary) {
        csp.pin(m, c).expect("marks in range");
    }
    solver::solve(&csp).values().map(<[usize]>::to_vec)
}

/// Evidence that a gadget has the three properties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetCertificate {
    /// Number of 3-colourings enumerated for P1.
    pub colorings: usize,
    /// An extension for every one-inequality boundary map.
    pub p2: Vec<([usize; 4], Vec<usize>)>,
    /// An extension to the graph without `d` for every equal boundary map.
    pub p3: Vec<([usize; 4], Vec<usize>)>,
}

/// The first property that fails, with its counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "property")]
pub enum GadgetViolation {
    /// A 3-colouring with both or neither of the marked pairs unequal.
    P1 { coloring: Vec<usize> },
    /// A one-inequality boundary map with no extension.
    P2 { boundary: [usize; 4] },
    /// An equal boundary map with no extension to the graph without `d`.
    P3 { boundary: [usize; 4] },
}

/// Check P1 over all 3-colourings of the gadget, and P2 and P3 over all
/// relevant boundary maps.
pub fn verify_gadget(g: &Gadget) -> std::result::Result<GadgetCertificate, GadgetViolation> {
    let [x, x1, y, y1] = g.marks;
    let mut bad = None;
    let colorings = for_each_coloring(&g.graph, 3, |c| {
        if (c[x] != c[x1]) == (c[y] != c[y1]) {
            bad = Some(c.to_vec());
            return false;
        }
        true
    });
    if let Some(coloring) = bad {
        return Err(GadgetViolation::P1 { coloring });
    }
    let mut p2 = Vec::new();
    for b in one_inequality_boundaries() {
        let ext = extend_boundary(&g.graph, g.marks, b).ok_or(GadgetViolation::P2 { boundary: b })?;
        p2.push((b, ext));
    }
    let without_d = g.graph.remove_edge(g.d.0, g.d.1).expect("d is an edge");
    let mut p3 = Vec::new();
    for b in equal_boundaries() {
        let ext = extend_boundary(&without_d, g.marks, b).ok_or(GadgetViolation::P3 { boundary: b })?;
        p3.push((b, ext));
    }
    Ok(GadgetCertificate { colorings, p2, p3 })
}

/// Re-check a certificate against a gadget: the extensions are colourings
/// with the stated boundaries, every required boundary is covered, and P1
/// holds over a fresh enumeration.
pub fn check_certificate(g: &Gadget, cert: &GadgetCertificate) -> bool {
    let without_d = g.graph.remove_edge(g.d.0, g.d.1).expect("d is an edge");
    let covers = |host: &Graph, list: &[([usize; 4], Vec<usize>)], want: Vec<[usize; 4]>| {
        let got: Vec<[usize; 4]> = list.iter().map(|e| e.0).collect();
        got == want
            && list.iter().all(|(b, c)| {
                solver::replay::check_coloring(host, c, 3) && g.marks.iter().zip(b).all(|(&m, &v)| c[m] == v)
            })
    };
    let [x, x1, y, y1] = g.marks;
    let mut p1 = true;
    let colorings = for_each_coloring(&g.graph, 3, |c| {
        p1 = (c[x] != c[x1]) != (c[y] != c[y1]);
        p1
    });
    p1 && colorings == cert.colorings
        && covers(&g.graph, &cert.p2, one_inequality_boundaries().collect())
        && covers(&without_d, &cert.p3, equal_boundaries().collect())
}

/// Boolean relation `b = a or e` over `(a, e, b)`.
const OR3: [[usize; 3]; 4] = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]];

/// Synthesis problem for gadgets on `n` vertices with marks `0, 1, 2, 3` and
/// marked edge `d`: edge indicators plus one colouring per boundary map that
/// must extend. Counterexample colourings are excluded by clauses.
struct Synthesis {
    n: usize,
    d: (usize, usize),
    pairs: Vec<(usize, usize)>,
    clauses: Vec<Vec<usize>>,
}

impl Synthesis {
    fn instance(&self) -> CspInstance {
        let n = self.n;
        let p = self.pairs.len();
        let copies: Vec<([usize; 4], bool)> = one_inequality_boundaries()
            .map(|b| (b, false))
            .chain(equal_boundaries().map(|b| (b, true)))
            .collect();
        let aux: usize = self.clauses.iter().map(Vec::len).sum();
        let color = |k: usize, v: usize| p + k * n + v;
        let mut csp = CspInstance::new(p + copies.len() * n + aux, 3).expect("small");
        let boolean = csp.add_relation(1, [[0], [1]]).expect("valid");
        // (edge, c(i), c(j)): an edge forces distinct colours.
        let rows: Vec<[usize; 3]> = (0..18)
            .map(|t| [t / 9, t / 3 % 3, t % 3])
            .filter(|r| r[0] == 0 || r[1] != r[2])
            .collect();
        let edge_rel = csp.add_relation(3, rows).expect("valid");
        let or3 = csp.add_relation(3, OR3).expect("valid");
        for (e, &(i, j)) in self.pairs.iter().enumerate() {
            csp.add_constraint(&[e], boolean).expect("in range");
            if (i, j) == (0, 1) || (i, j) == (2, 3) {
                csp.pin(e, 0).expect("in range");
            }
            if (i, j) == self.d {
                csp.pin(e, 1).expect("in range");
            }
        }
        for (k, &(b, drop_d)) in copies.iter().enumerate() {
            for (m, &c) in b.iter().enumerate() {
                csp.pin(color(k, m), c).expect("in range");
            }
            for (e, &(i, j)) in self.pairs.iter().enumerate() {
                if !(drop_d && (i, j) == self.d) {
                    csp.add_constraint(&[e, color(k, i), color(k, j)], edge_rel).expect("in range");
                }
            }
        }
        let mut next = p + copies.len() * n;
        for clause in &self.clauses {
            // Chain a_t = a_{t-1} or e_t with a_0 = e_0, and require the last.
            csp.add_equality(next, clause[0]).expect("in range");
            for &e in &clause[1..] {
                csp.add_constraint(&[next, e, next + 1], or3).expect("in range");
                next += 1;
            }
            csp.add_constraint(&[next], boolean).expect("in range");
            csp.pin(next, 1).expect("in range");
            next += 1;
        }
        csp
    }
}

/// Marked-edge choices up to the symmetries of the marks: both endpoints
/// unmarked, one endpoint marked, or joining the two marked pairs.
fn d_classes(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if n >= 6 {
        out.push((4, 5));
    }
    if n >= 5 {
        out.push((0, 4));
    }
    out.push((0, 2));
    out
}

/// Counterexample-guided search for a gadget on at most `max_vertices`
/// vertices, trying sizes from 5 upwards. `budget` bounds the total number
/// of synthesis rounds; `None` means no gadget was found within it.
pub fn search_gadget(max_vertices: usize, budget: usize) -> Result<Option<Gadget>> {
    if max_vertices < 5 {
        return Err(Error::InvalidInstance("gadgets need at least 5 vertices".into()));
    }
    let mut rounds = 0;
    for n in 5..=max_vertices {
        for d in d_classes(n) {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let mut synth = Synthesis { n, d, pairs, clauses: Vec::new() };
            loop {
                if rounds == budget {
                    info!("gadget search: budget of {budget} rounds exhausted");
                    return Ok(None);
                }
                rounds += 1;
                let Some(values) = solver::solve(&synth.instance()).values().map(<[usize]>::to_vec) else {
                    debug!("no gadget on {n} vertices with d = {d:?}");
                    break;
                };
                let edges = synth.pairs.iter().enumerate().filter(|(e, _)| values[*e] == 1).map(|(_, &p)| p);
                let gadget = Gadget::new(Graph::new(n, edges)?, [0, 1, 2, 3], d)?;
                match verify_gadget(&gadget) {
                    Ok(_) => {
                        info!("gadget found on {n} vertices after {rounds} rounds");
                        return Ok(Some(gadget));
                    }
                    Err(GadgetViolation::P1 { coloring }) => {
                        let clause: Vec<usize> = synth
                            .pairs
                            .iter()
                            .enumerate()
                            .filter(|(_, &(i, j))| coloring[i] == coloring[j])
                            .map(|(e, _)| e)
                            .collect();
                        if clause.is_empty() {
                            break;
                        }
                        synth.clauses.push(clause);
                    }
                    Err(other) => {
                        return Err(Error::InvalidGadget(format!("synthesised candidate violates {other:?}")));
                    }
                }
            }
        }
    }
    Ok(None)
}
