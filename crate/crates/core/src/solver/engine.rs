use std::collections::{HashMap, HashSet, VecDeque};

use super::{CspInstance, RelationId};
use crate::unionfind::UnionFind;

/// Knobs for [`super::solve_with`].
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Collapse equality pairs with union-find before search. When off,
    /// each equality becomes a binary table constraint.
    pub merge_equalities: bool,
    /// The caller asserts every permutation of the values maps solutions to
    /// solutions (true for colouring). Branching then tries only values
    /// already chosen higher up plus the least fresh one.
    pub interchangeable_values: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { merge_equalities: true, interchangeable_values: false }
    }
}

struct PreparedRelation {
    arity: usize,
    flat: Vec<usize>,
    // For binary relations: forward[a] = {b : (a,b) in R}, backward[b] = {a : (a,b) in R}.
    forward: Vec<u64>,
    backward: Vec<u64>,
}

struct Problem {
    words: usize,
    relations: Vec<PreparedRelation>,
    scopes: Vec<Vec<u32>>,
    constraint_relation: Vec<usize>,
    watch_start: Vec<usize>,
    watch: Vec<u32>,
}

struct State {
    domains: Vec<u64>,
    trail_vars: Vec<u32>,
    trail_words: Vec<u64>,
    queue: VecDeque<u32>,
    queued: Vec<bool>,
    support: Vec<u64>,
}

fn words_for(domain_size: usize) -> usize {
    domain_size.div_ceil(64).max(1)
}

fn bit(words: &[u64], v: usize) -> bool {
    words[v / 64] >> (v % 64) & 1 == 1
}

fn set_bit(words: &mut [u64], v: usize) {
    words[v / 64] |= 1 << (v % 64);
}

fn popcount(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

fn first_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Smallest set bit strictly greater than `after` (or any bit if `after` is `None`).
fn next_bit(words: &[u64], after: Option<usize>) -> Option<usize> {
    let start = after.map_or(0, |a| a + 1);
    let mut i = start / 64;
    if i >= words.len() {
        return None;
    }
    let mut w = words[i] & (!0u64).checked_shl((start % 64) as u32).unwrap_or(0);
    loop {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
        i += 1;
        if i >= words.len() {
            return None;
        }
        w = words[i];
    }
}

fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + b)
        })
    })
}

impl PreparedRelation {
    fn new(arity: usize, flat: Vec<usize>, domain_size: usize, words: usize) -> Self {
        let (mut forward, mut backward) = (Vec::new(), Vec::new());
        if arity == 2 {
            forward = vec![0u64; domain_size * words];
            backward = vec![0u64; domain_size * words];
            for t in flat.chunks(2) {
                set_bit(&mut forward[t[0] * words..(t[0] + 1) * words], t[1]);
                set_bit(&mut backward[t[1] * words..(t[1] + 1) * words], t[0]);
            }
        }
        PreparedRelation { arity, flat, forward, backward }
    }

    fn is_empty(&self) -> bool {
        self.flat.is_empty() && self.arity > 0
    }
}

/// Outcome of preprocessing: either a refutation or a problem plus the map
/// from original variables to compact ones.
enum Prepared {
    Unsat,
    Ready { problem: Problem, domains: Vec<u64>, compact: Vec<usize>, vars: usize },
}

fn prepare(instance: &CspInstance, options: &SolveOptions) -> Prepared {
    let d = instance.domain_size();
    let words = words_for(d);
    let n = instance.var_count();

    let mut uf = UnionFind::new(n);
    if options.merge_equalities {
        for &(a, b) in instance.equalities() {
            uf.union(a, b);
        }
    }
    let mut compact = vec![usize::MAX; n];
    let mut rep_id = vec![usize::MAX; n];
    let mut vars = 0;
    for (v, slot) in compact.iter_mut().enumerate() {
        let r = uf.find(v);
        if rep_id[r] == usize::MAX {
            rep_id[r] = vars;
            vars += 1;
        }
        *slot = rep_id[r];
    }

    if d == 0 {
        return if n == 0 { ready_empty(compact) } else { Prepared::Unsat };
    }

    let mut relations: Vec<PreparedRelation> = (0..instance.relation_count())
        .map(|i| {
            let r = instance.relation(RelationId(i));
            PreparedRelation::new(r.arity(), r.flat.clone(), d, words)
        })
        .collect();
    let mut derived: HashMap<(usize, Vec<u8>), usize> = HashMap::new();

    let mut domains = vec![!0u64; vars * words];
    let tail = d % 64;
    if tail != 0 {
        for v in 0..vars {
            domains[v * words + words - 1] = (1u64 << tail) - 1;
        }
    }

    let mut scopes: Vec<Vec<u32>> = Vec::new();
    let mut constraint_relation = Vec::new();
    let mut seen: HashSet<(Vec<u32>, usize)> = HashSet::new();

    let mut push = |scope: Vec<u32>, rel: usize, relations: &mut Vec<PreparedRelation>| -> bool {
        // Collapse repeated variables into a projected relation.
        let mut distinct: Vec<u32> = Vec::new();
        let mut pattern: Vec<u8> = Vec::with_capacity(scope.len());
        for &v in &scope {
            match distinct.iter().position(|&w| w == v) {
                Some(p) => pattern.push(p as u8),
                None => {
                    pattern.push(distinct.len() as u8);
                    distinct.push(v);
                }
            }
        }
        let rel = if distinct.len() == scope.len() {
            rel
        } else {
            *derived.entry((rel, pattern.clone())).or_insert_with(|| {
                let src = &relations[rel];
                let mut rows: Vec<Vec<usize>> = src
                    .flat
                    .chunks(src.arity)
                    .filter(|t| t.iter().enumerate().all(|(i, &x)| t[first_pos(&pattern, pattern[i])] == x))
                    .map(|t| {
                        (0..distinct.len()).map(|b| t[first_pos(&pattern, b as u8)]).collect()
                    })
                    .collect();
                rows.sort_unstable();
                rows.dedup();
                relations.push(PreparedRelation::new(distinct.len(), rows.concat(), d, words));
                relations.len() - 1
            })
        };
        if relations[rel].is_empty() {
            return false;
        }
        if distinct.len() == 1 {
            let mut allowed = vec![0u64; words];
            for &x in &relations[rel].flat {
                set_bit(&mut allowed, x);
            }
            let v = distinct[0] as usize;
            for w in 0..words {
                domains[v * words + w] &= allowed[w];
            }
            return true;
        }
        if seen.insert((distinct.clone(), rel)) {
            scopes.push(distinct);
            constraint_relation.push(rel);
        }
        true
    };

    for i in 0..instance.constraint_count() {
        let scope: Vec<u32> = instance.raw_scope(i).iter().map(|&v| compact[v as usize] as u32).collect();
        let rel = instance.raw_relation(i).0;
        if !push(scope, rel, &mut relations) {
            return Prepared::Unsat;
        }
    }
    if !options.merge_equalities && !instance.equalities().is_empty() {
        let flat: Vec<usize> = (0..d).flat_map(|x| [x, x]).collect();
        relations.push(PreparedRelation::new(2, flat, d, words));
        let eq = relations.len() - 1;
        for &(a, b) in instance.equalities() {
            if !push(vec![compact[a] as u32, compact[b] as u32], eq, &mut relations) {
                return Prepared::Unsat;
            }
        }
    }

    if (0..vars).any(|v| domains[v * words..(v + 1) * words].iter().all(|&w| w == 0)) {
        return Prepared::Unsat;
    }

    let mut counts = vec![0usize; vars + 1];
    for s in &scopes {
        for &v in s {
            counts[v as usize + 1] += 1;
        }
    }
    for v in 0..vars {
        counts[v + 1] += counts[v];
    }
    let mut fill = counts.clone();
    let mut watch = vec![0u32; counts[vars]];
    for (c, s) in scopes.iter().enumerate() {
        for &v in s {
            watch[fill[v as usize]] = c as u32;
            fill[v as usize] += 1;
        }
    }
    let problem = Problem {
        words,
        relations,
        scopes,
        constraint_relation,
        watch_start: counts,
        watch,
    };
    Prepared::Ready { problem, domains, compact, vars }
}

fn ready_empty(compact: Vec<usize>) -> Prepared {
    let problem = Problem {
        words: 1,
        relations: Vec::new(),
        scopes: Vec::new(),
        constraint_relation: Vec::new(),
        watch_start: vec![0],
        watch: Vec::new(),
    };
    Prepared::Ready { problem, domains: Vec::new(), compact, vars: 0 }
}

fn first_pos(pattern: &[u8], block: u8) -> usize {
    pattern.iter().position(|&p| p == block).expect("block occurs")
}

impl Problem {
    fn dom<'a>(&self, domains: &'a [u64], v: usize) -> &'a [u64] {
        &domains[v * self.words..(v + 1) * self.words]
    }
}

impl State {
    /// Narrow `v` to `dom(v) & mask`. Returns `None` on wipe-out, else
    /// whether anything changed.
    fn narrow(&mut self, p: &Problem, v: usize, mask: &[u64]) -> Option<bool> {
        let w = p.words;
        let range = v * w..(v + 1) * w;
        let old = &self.domains[range.clone()];
        let mut changed = false;
        let mut empty = true;
        for i in 0..w {
            let nw = old[i] & mask[i];
            changed |= nw != old[i];
            empty &= nw == 0;
        }
        if empty {
            return None;
        }
        if changed {
            self.trail_vars.push(v as u32);
            self.trail_words.extend_from_slice(&self.domains[range.clone()]);
            for i in 0..w {
                self.domains[v * w + i] &= mask[i];
            }
        }
        Some(changed)
    }

    fn restore(&mut self, p: &Problem, mark: usize) {
        let w = p.words;
        while self.trail_vars.len() > mark {
            let v = self.trail_vars.pop().expect("non-empty") as usize;
            let at = self.trail_words.len() - w;
            self.domains[v * w..(v + 1) * w].copy_from_slice(&self.trail_words[at..]);
            self.trail_words.truncate(at);
        }
    }

    fn enqueue_var(&mut self, p: &Problem, v: usize, except: Option<usize>) {
        for &c in &p.watch[p.watch_start[v]..p.watch_start[v + 1]] {
            if Some(c as usize) != except && !self.queued[c as usize] {
                self.queued[c as usize] = true;
                self.queue.push_back(c);
            }
        }
    }

    fn clear_queue(&mut self) {
        while let Some(c) = self.queue.pop_front() {
            self.queued[c as usize] = false;
        }
    }

    /// Run the queue to a fixpoint. Returns false on wipe-out.
    fn propagate(&mut self, p: &Problem) -> bool {
        while let Some(c) = self.queue.pop_front() {
            let c = c as usize;
            self.queued[c] = false;
            if !self.revise(p, c) {
                self.clear_queue();
                return false;
            }
        }
        true
    }

    fn revise(&mut self, p: &Problem, c: usize) -> bool {
        let rel = &p.relations[p.constraint_relation[c]];
        let scope = &p.scopes[c];
        let w = p.words;
        if rel.arity == 2 {
            return self.revise_binary(p, c, rel, scope[0] as usize, scope[1] as usize);
        }
        let k = rel.arity;
        self.support.clear();
        self.support.resize(k * w, 0);
        for t in rel.flat.chunks(k) {
            if t.iter().zip(scope).all(|(&x, &v)| bit(p.dom(&self.domains, v as usize), x)) {
                for (i, &x) in t.iter().enumerate() {
                    set_bit(&mut self.support[i * w..(i + 1) * w], x);
                }
            }
        }
        let support = std::mem::take(&mut self.support);
        let mut ok = true;
        for (i, &v) in scope.iter().enumerate() {
            match self.narrow(p, v as usize, &support[i * w..(i + 1) * w]) {
                None => {
                    ok = false;
                    break;
                }
                Some(true) => self.enqueue_var(p, v as usize, Some(c)),
                Some(false) => {}
            }
        }
        self.support = support;
        ok
    }

    fn revise_binary(&mut self, p: &Problem, c: usize, rel: &PreparedRelation, x: usize, y: usize) -> bool {
        let w = p.words;
        // (narrowed var, other var, rows keyed by narrowed value, rows keyed by other value)
        for (a, b, rows, cols) in [(x, y, &rel.forward, &rel.backward), (y, x, &rel.backward, &rel.forward)] {
            let db = p.dom(&self.domains, b);
            let mut keep = vec![0u64; w];
            if popcount(db) == 1 {
                let only = first_bit(db).expect("non-empty");
                keep.copy_from_slice(&cols[only * w..(only + 1) * w]);
            } else {
                for va in iter_bits(p.dom(&self.domains, a)) {
                    let row = &rows[va * w..(va + 1) * w];
                    if row.iter().zip(db).any(|(r, d)| r & d != 0) {
                        set_bit(&mut keep, va);
                    }
                }
            }
            match self.narrow(p, a, &keep) {
                None => return false,
                Some(true) => self.enqueue_var(p, a, Some(c)),
                Some(false) => {}
            }
        }
        true
    }
}

struct Frame {
    var: usize,
    mark: usize,
    candidates: Vec<u64>,
    value: Option<usize>,
}

/// Depth-first search with GAC. Returns an assignment for the original
/// variables, or `None` when the search space is exhausted.
pub(super) fn search(instance: &CspInstance, options: &SolveOptions) -> Option<Vec<usize>> {
    let (problem, domains, compact, vars) = match prepare(instance, options) {
        Prepared::Unsat => return None,
        Prepared::Ready { problem, domains, compact, vars } => (problem, domains, compact, vars),
    };
    let p = &problem;
    let w = p.words;
    let mut st = State {
        domains,
        trail_vars: Vec::new(),
        trail_words: Vec::new(),
        queue: (0..p.scopes.len() as u32).collect(),
        queued: vec![true; p.scopes.len()],
        support: Vec::new(),
    };
    if !st.propagate(p) {
        return None;
    }

    let mut stack: Vec<Frame> = Vec::new();
    'descend: loop {
        // Choose the unfixed variable with the fewest values, lowest index first.
        let mut best: Option<(u32, usize)> = None;
        for v in 0..vars {
            let size = popcount(p.dom(&st.domains, v));
            if size > 1 && best.is_none_or(|(s, _)| size < s) {
                best = Some((size, v));
                if size == 2 {
                    break;
                }
            }
        }
        let Some((_, var)) = best else {
            let values: Vec<usize> =
                (0..vars).map(|v| first_bit(p.dom(&st.domains, v)).expect("fixed")).collect();
            return Some(compact.iter().map(|&c| values[c]).collect());
        };
        let mut candidates = p.dom(&st.domains, var).to_vec();
        if options.interchangeable_values {
            let mut used = vec![0u64; w];
            for f in &stack {
                set_bit(&mut used, f.value.expect("assigned"));
            }
            let fresh = iter_bits(&candidates).find(|&v| !bit(&used, v));
            for (i, c) in candidates.iter_mut().enumerate() {
                *c &= used[i];
            }
            if let Some(f) = fresh {
                set_bit(&mut candidates, f);
            }
        }
        stack.push(Frame { var, mark: st.trail_vars.len(), candidates, value: None });

        // Try the next candidate of the top frame, backtracking as needed.
        loop {
            let frame = stack.last_mut()?;
            st.restore(p, frame.mark);
            let Some(value) = next_bit(&frame.candidates, frame.value) else {
                stack.pop();
                continue;
            };
            frame.value = Some(value);
            let var = frame.var;
            let mut only = vec![0u64; w];
            set_bit(&mut only, value);
            st.narrow(p, var, &only).expect("value is in the domain");
            st.enqueue_var(p, var, None);
            if st.propagate(p) {
                continue 'descend;
            }
        }
    }
}

#[cfg(test)]
pub(super) fn bits_roundtrip(words: &[u64]) -> Vec<usize> {
    iter_bits(words).collect()
}

#[cfg(test)]
pub(super) fn next_bit_after(words: &[u64], after: Option<usize>) -> Option<usize> {
    next_bit(words, after)
}
