//! Finite undirected graphs with loops, their tensor powers and the
//! quasi-near-unanimity quotient of a power.
//!
//! Vertices are the dense integers `0..n`. Edges are unordered pairs stored
//! canonically as `(u, v)` with `u <= v`; `u == v` is a loop.
//!
//! Product vertices are tuples, numbered in mixed radix with the first
//! coordinate most significant: in `g × h` the pair `(a, b)` is vertex
//! `a * |V(h)| + b`.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::tuples;

/// A finite undirected graph on vertices `0..n`, loops allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Build a graph from an edge list. Edges are canonicalised and
    /// deduplicated; an endpoint `>= n` is an error.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph::from_sorted(n, set.into_iter().collect()))
    }

    fn from_sorted(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            if u != v {
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph { n, edges, adjacency }
    }

    /// The graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Graph {
        Graph::from_sorted(n, Vec::new())
    }

    /// The complete loopless graph `K_n`.
    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_sorted(n, edges)
    }

    /// The cycle `C_n` (`n >= 3`).
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("in range")
    }

    /// A single vertex carrying a loop.
    pub fn loop_vertex() -> Graph {
        Graph::from_sorted(1, vec![(0, 0)])
    }

    /// The Petersen graph: outer 5-cycle `0..5`, inner pentagram `5..10`.
    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::new(10, edges).expect("in range")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges in ascending lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbours of `v` (contains `v` itself iff `v` has a loop).
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|&(u, v)| u == v)
    }

    /// Connected in the usual sense; the empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// The same graph without the edge `{u, v}`.
    pub fn remove_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let key = (u.min(v), u.max(v));
        let pos = self.edges.binary_search(&key).map_err(|_| Error::MissingEdge(u, v))?;
        let mut edges = self.edges.clone();
        edges.remove(pos);
        Ok(Graph::from_sorted(self.n, edges))
    }

    /// Relabel vertices: old vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Whether `map` (vertex of `self` to vertex of `target`) sends every edge to an edge.
    pub fn is_homomorphism_to(&self, target: &Graph, map: &[usize]) -> bool {
        map.len() == self.n
            && map.iter().all(|&w| w < target.n)
            && self.edges.iter().all(|&(u, v)| target.has_edge(map[u], map[v]))
    }

    /// Componentwise adjacency of two tuples of vertices.
    fn tuples_adjacent(&self, a: &[usize], b: &[usize]) -> bool {
        a.iter().zip(b).all(|(&x, &y)| self.has_edge(x, y))
    }

    /// Every directed edge `(u, v)`; loops appear once, other edges twice.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::with_capacity(2 * self.edges.len());
        for &(u, v) in &self.edges {
            arcs.push((u, v));
            if u != v {
                arcs.push((v, u));
            }
        }
        arcs.sort_unstable();
        arcs
    }
}

/// The categorical (tensor) product `g × h`.
pub fn tensor_product(g: &Graph, h: &Graph) -> Graph {
    let m = h.vertex_count();
    let mut edges = BTreeSet::new();
    for &(a, c) in g.edges() {
        for &(b, d) in h.edges() {
            let pairs = [(a * m + b, c * m + d), (a * m + d, c * m + b)];
            for (x, y) in pairs {
                edges.insert((x.min(y), x.max(y)));
            }
        }
    }
    Graph::from_sorted(g.vertex_count() * m, edges.into_iter().collect())
}

/// The `n`-fold tensor power of `g`; vertices are `n`-tuples in mixed radix.
pub fn power(g: &Graph, n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::ArityTooSmall { min: 1, got: 0 });
    }
    let mut acc = g.clone();
    for _ in 1..n {
        acc = tensor_product(&acc, g);
    }
    Ok(acc)
}

/// The factor map of the quasi-near-unanimity quotient of a power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassMap {
    base: usize,
    arity: usize,
    class_of: Vec<usize>,
    representatives: Vec<usize>,
}

impl ClassMap {
    /// Number of tuples, `base^arity`.
    pub fn source_size(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Class of the tuple with mixed-radix index `tuple`.
    pub fn class_of(&self, tuple: usize) -> usize {
        self.class_of[tuple]
    }

    /// Index of the representative tuple of `class`: its constant tuple when it
    /// has one, otherwise its unique member.
    pub fn representative(&self, class: usize) -> usize {
        self.representatives[class]
    }

    /// The representative of `class` as a tuple of vertices.
    pub fn representative_tuple(&self, class: usize) -> Vec<usize> {
        tuples::decode(self.representatives[class], self.base, self.arity)
    }

    pub fn class_map(&self) -> &[usize] {
        &self.class_of
    }
}

/// Indices of the tuples identified with the constant tuple `(x, .., x)`:
/// the constant itself and every tuple with a single `y` among the `x`s.
fn almost_constant_group(base: usize, arity: usize, x: usize, y: usize) -> Vec<usize> {
    let mut group = Vec::with_capacity(arity + 1);
    let mut t = vec![x; arity];
    group.push(tuples::encode(&t, base));
    for i in 0..arity {
        t[i] = y;
        group.push(tuples::encode(&t, base));
        t[i] = x;
    }
    group
}

/// Factor `h^n` by the equivalence generated by identifying
/// `{(x,..,x,y), .., (y,x,..,x), (x,..,x)}` for all vertices `x, y`.
///
/// For `n = 1` the relation is plain equality.
/// Classes are numbered in order of their smallest member. Two classes are
/// adjacent iff some members are componentwise adjacent in `h`.
pub fn qnu_quotient(h: &Graph, n: usize) -> Result<(Graph, ClassMap)> {
    if n == 0 {
        return Err(Error::ArityTooSmall { min: 1, got: 0 });
    }
    let base = h.vertex_count();
    let size = tuples::count(base, n)
        .ok_or(Error::ResourceGuard { what: "tuple count", estimate: u128::MAX, cap: usize::MAX as u128 })?;

    let mut sets = crate::unionfind::UnionFind::new(size);
    // With a single coordinate there is no majority to preserve; ∼ is equality.
    let generators = if n >= 2 { base } else { 0 };
    for x in 0..generators {
        for y in 0..base {
            let group = almost_constant_group(base, n, x, y);
            for &t in &group[1..] {
                sets.union(group[0], t);
            }
        }
    }

    let mut class_of = vec![usize::MAX; size];
    let mut root_class = vec![usize::MAX; size];
    let mut representatives = Vec::new();
    for t in 0..size {
        let root = sets.find(t);
        if root_class[root] == usize::MAX {
            root_class[root] = representatives.len();
            representatives.push(t);
        }
        class_of[t] = root_class[root];
    }
    // Constant tuples take precedence as representatives.
    let mut has_constant = vec![false; representatives.len()];
    for x in 0..base {
        let t = tuples::encode(&vec![x; n], base);
        let c = class_of[t];
        if !has_constant[c] {
            has_constant[c] = true;
            representatives[c] = t;
        }
    }

    let arcs = h.arcs();
    let mut edges = BTreeSet::new();
    let mut choice = vec![0usize; n];
    if !arcs.is_empty() {
        // Walk every n-tuple of arcs; each is a pair of componentwise adjacent tuples.
        loop {
            let (mut a, mut b) = (0usize, 0usize);
            for &i in &choice {
                a = a * base + arcs[i].0;
                b = b * base + arcs[i].1;
            }
            let (ca, cb) = (class_of[a], class_of[b]);
            edges.insert((ca.min(cb), ca.max(cb)));
            if !tuples::advance(&mut choice, arcs.len()) {
                break;
            }
        }
    }
    let quotient = Graph::from_sorted(representatives.len(), edges.into_iter().collect());
    Ok((quotient, ClassMap { base, arity: n, class_of, representatives }))
}

/// Whether `t` is constant with at most one exception.
pub fn is_almost_constant(t: &[usize]) -> bool {
    if t.len() <= 2 {
        return true;
    }
    // The majority value is t[0] unless t[0] is the exception, then it is t[1].
    let major = if t[0] == t[1] || t[0] == t[2] { t[0] } else { t[1] };
    t.iter().filter(|&&v| v != major).count() <= 1
}

/// Componentwise adjacency of the representatives, exposed for checking the
/// quotient against its definition.
pub fn classes_adjacent_by_members(h: &Graph, map: &ClassMap, a: usize, b: usize) -> bool {
    let n = map.arity;
    let base = map.base;
    let members_a: Vec<usize> = (0..map.source_size()).filter(|&t| map.class_of[t] == a).collect();
    let members_b: Vec<usize> = (0..map.source_size()).filter(|&t| map.class_of[t] == b).collect();
    members_a.iter().any(|&s| {
        let ts = tuples::decode(s, base, n);
        members_b.iter().any(|&u| h.tuples_adjacent(&ts, &tuples::decode(u, base, n)))
    })
}

/// Canonical form of a loopless graph on at most 10 vertices: the relabelling
/// whose sorted edge list is lexicographically least. Exhaustive over all
/// vertex permutations.
pub fn canonical_form(g: &Graph) -> Graph {
    let n = g.vertex_count();
    assert!(n <= 10, "canonical_form is brute force over permutations");
    let code = |perm: &[usize]| -> Vec<(usize, usize)> {
        let mut e: Vec<_> = g
            .edges()
            .iter()
            .map(|&(u, v)| (perm[u].min(perm[v]), perm[u].max(perm[v])))
            .collect();
        e.sort_unstable();
        e
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = code(&perm);
    while next_permutation(&mut perm) {
        let c = code(&perm);
        if c < best {
            best = c;
        }
    }
    Graph::from_sorted(n, best)
}

/// Brute-force isomorphism test for small graphs.
pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && canonical_form(a) == canonical_form(b)
}

/// Advance `perm` to the next permutation in lexicographic order.
pub(crate) fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Connected loopless non-3-colourable graphs, one per isomorphism class,
/// ordered by vertex count, then edge count, then canonical edge list.
///
/// Graphs are generated lazily one vertex count at a time. Each vertex count
/// `n` costs `2^(n(n-1)/2)` subset checks plus an `n!` canonicalisation per
/// survivor, so `max_n <= 7` is the practical range.
pub fn enumerate_non_3col(max_n: usize) -> NonThreeColorable {
    NonThreeColorable { max_n, next_n: 1, pending: VecDeque::new() }
}

/// Iterator returned by [`enumerate_non_3col`].
#[derive(Debug, Clone)]
pub struct NonThreeColorable {
    max_n: usize,
    next_n: usize,
    pending: VecDeque<Graph>,
}

impl Iterator for NonThreeColorable {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        while self.pending.is_empty() {
            if self.next_n > self.max_n {
                return None;
            }
            self.pending = non_3col_on(self.next_n).into();
            self.next_n += 1;
        }
        self.pending.pop_front()
    }
}

fn non_3col_on(n: usize) -> Vec<Graph> {
    if n < 4 {
        return Vec::new();
    }
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut found = BTreeSet::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        if mask.count_ones() < 6 {
            continue;
        }
        let mut adj = [0u16; 16];
        for (k, &(u, v)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        if !mask_connected(&adj[..n]) || mask_colorable(&adj[..n]) {
            continue;
        }
        let edges = pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &p)| p);
        let g = canonical_form(&Graph::new(n, edges).expect("in range"));
        found.insert((g.edge_count(), g.edges.clone()));
    }
    found.into_iter().map(|(_, e)| Graph::from_sorted(n, e)).collect()
}

fn mask_connected(adj: &[u16]) -> bool {
    let full = (1u32 << adj.len()) - 1;
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] as u32 & !seen;
        seen |= new;
        frontier |= new;
    }
    seen == full
}

/// Plain backtracking 3-colouring for tiny graphs, used only as a fast filter.
fn mask_colorable(adj: &[u16]) -> bool {
    fn go(adj: &[u16], v: usize, classes: &mut [u16; 3]) -> bool {
        if v == adj.len() {
            return true;
        }
        // The first vertex only needs one colour up to symmetry.
        let limit = if v == 0 { 1 } else { 3 };
        for c in 0..limit {
            if classes[c] & adj[v] == 0 {
                classes[c] |= 1 << v;
                if go(adj, v + 1, classes) {
                    return true;
                }
                classes[c] &= !(1 << v);
            }
        }
        false
    }
    go(adj, 0, &mut [0; 3])
}
