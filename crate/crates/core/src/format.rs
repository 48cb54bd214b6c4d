//! Text formats for graphs, relational structures and gadgets.
//!
//! All formats are line based with 1-based element numbers. Lines starting
//! with `c` are comments; blank lines are ignored.
//!
//! ```text
//! p graph <n> <m>        p struct <domain> <k>
//! e <u> <v>              r <name> <arity> <count>
//!                        t <a1> .. <a_arity>
//! ```
//!
//! A gadget file is a graph file followed by `m <x> <x'> <y> <y'>` and
//! `d <u> <v>`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::chains::gadget::Gadget;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::structure::RelStructure;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Non-empty, non-comment lines as (1-based line number, fields).
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let fields: Vec<&str> = l.split_whitespace().collect();
        match fields.first() {
            None | Some(&"c") => None,
            Some(_) => Some((i + 1, fields)),
        }
    })
}

fn numbers(line: usize, fields: &[&str]) -> Result<Vec<usize>> {
    fields
        .iter()
        .map(|f| f.parse::<usize>().map_err(|_| parse_err(line, format!("expected a number, found {f:?}"))))
        .collect()
}

/// A 1-based element number below `limit`, converted to 0-based.
fn element(line: usize, x: usize, limit: usize) -> Result<usize> {
    if x == 0 || x > limit {
        return Err(parse_err(line, format!("element {x} outside 1..={limit}")));
    }
    Ok(x - 1)
}

fn expect_shape(line: usize, fields: &[&str], tag: &str, count: usize) -> Result<Vec<usize>> {
    if fields[0] != tag || fields.len() != count + 1 {
        return Err(parse_err(line, format!("expected `{tag}` with {count} fields")));
    }
    numbers(line, &fields[1..])
}

struct GraphParse {
    graph: Graph,
    /// Lines after the edges, for formats that extend the graph format.
    rest: Vec<(usize, Vec<String>)>,
}

fn parse_graph_prefix(text: &str) -> Result<GraphParse> {
    let mut lines = records(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing `p graph` header"))?;
    if header.len() != 4 || header[0] != "p" || header[1] != "graph" {
        return Err(parse_err(hline, "expected `p graph <n> <m>`"));
    }
    let nm = numbers(hline, &header[2..])?;
    let (n, m) = (nm[0], nm[1]);
    let mut edges = BTreeSet::new();
    let mut rest = Vec::new();
    for (line, fields) in lines {
        if fields[0] == "e" && rest.is_empty() {
            let uv = expect_shape(line, &fields, "e", 2)?;
            let (u, v) = (element(line, uv[0], n)?, element(line, uv[1], n)?);
            if !edges.insert((u.min(v), u.max(v))) {
                return Err(parse_err(line, format!("duplicate edge {} {}", uv[0], uv[1])));
            }
        } else {
            rest.push((line, fields.iter().map(|s| s.to_string()).collect()));
        }
    }
    if edges.len() != m {
        return Err(parse_err(hline, format!("header announces {m} edges, found {}", edges.len())));
    }
    Ok(GraphParse { graph: Graph::new(n, edges)?, rest })
}

/// Parse the graph format.
pub fn read_graph(text: &str) -> Result<Graph> {
    let p = parse_graph_prefix(text)?;
    match p.rest.first() {
        Some((line, fields)) => Err(parse_err(*line, format!("unexpected `{}` line", fields[0]))),
        None => Ok(p.graph),
    }
}

/// Write the canonical graph format: edges sorted, `u <= v`.
pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("p graph {} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).expect("write to String");
    }
    out
}

/// Parse the structure format.
pub fn read_struct(text: &str) -> Result<RelStructure> {
    let mut lines = records(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing `p struct` header"))?;
    if header.len() != 4 || header[0] != "p" || header[1] != "struct" {
        return Err(parse_err(hline, "expected `p struct <domain> <k>`"));
    }
    let dk = numbers(hline, &header[2..])?;
    let (domain, k) = (dk[0], dk[1]);
    let mut s = RelStructure::new(domain);
    let mut relations = 0;
    let mut last_line = hline;
    while let Some((line, fields)) = lines.next() {
        if fields[0] != "r" || fields.len() != 4 {
            return Err(parse_err(line, "expected `r <name> <arity> <count>`"));
        }
        let name = fields[1].to_string();
        let ac = numbers(line, &fields[2..])?;
        let (arity, count) = (ac[0], ac[1]);
        let mut tuples = Vec::with_capacity(count);
        let mut seen = BTreeSet::new();
        for _ in 0..count {
            let (tline, t) = lines.next().ok_or_else(|| parse_err(line, format!("relation {name} is missing tuples")))?;
            if t[0] != "t" || t.len() != arity + 1 {
                return Err(parse_err(tline, format!("expected `t` with {arity} entries")));
            }
            let tuple = numbers(tline, &t[1..])?
                .into_iter()
                .map(|x| element(tline, x, domain))
                .collect::<Result<Vec<_>>>()?;
            if !seen.insert(tuple.clone()) {
                return Err(parse_err(tline, "duplicate tuple"));
            }
            tuples.push(tuple);
            last_line = tline;
        }
        s = s.with_relation(name, arity, tuples).map_err(|e| parse_err(line, e.to_string()))?;
        relations += 1;
    }
    if relations != k {
        return Err(parse_err(last_line, format!("header announces {k} relations, found {relations}")));
    }
    Ok(s)
}

/// Write the structure format.
pub fn write_struct(s: &RelStructure) -> String {
    let mut out = format!("p struct {} {}\n", s.domain_size(), s.relations().len());
    for r in s.relations() {
        writeln!(out, "r {} {} {}", r.name, r.arity, r.tuples().len()).expect("write to String");
        for t in r.tuples() {
            out.push('t');
            for x in t {
                write!(out, " {}", x + 1).expect("write to String");
            }
            out.push('\n');
        }
    }
    out
}

/// Parse a gadget file.
pub fn read_gadget(text: &str) -> Result<Gadget> {
    let p = parse_graph_prefix(text)?;
    let n = p.graph.vertex_count();
    let (mut marks, mut d) = (None, None);
    for (line, fields) in &p.rest {
        let fields: Vec<&str> = fields.iter().map(String::as_str).collect();
        match fields[0] {
            "m" if marks.is_none() => {
                let m = expect_shape(*line, &fields, "m", 4)?;
                let m: Vec<usize> = m.into_iter().map(|x| element(*line, x, n)).collect::<Result<_>>()?;
                marks = Some([m[0], m[1], m[2], m[3]]);
            }
            "d" if d.is_none() => {
                let uv = expect_shape(*line, &fields, "d", 2)?;
                d = Some((element(*line, uv[0], n)?, element(*line, uv[1], n)?));
            }
            other => return Err(parse_err(*line, format!("unexpected `{other}` line"))),
        }
    }
    let last = text.lines().count().max(1);
    let marks = marks.ok_or_else(|| parse_err(last, "missing `m` line"))?;
    let d = d.ok_or_else(|| parse_err(last, "missing `d` line"))?;
    Gadget::new(p.graph, marks, d)
}

/// Write a gadget file.
pub fn write_gadget(g: &Gadget) -> String {
    let mut out = write_graph(&g.graph);
    let [x, x1, y, y1] = g.marks;
    writeln!(out, "m {} {} {} {}", x + 1, x1 + 1, y + 1, y1 + 1).expect("write to String");
    writeln!(out, "d {} {}", g.d.0 + 1, g.d.1 + 1).expect("write to String");
    out
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn triangle_and_loop() {
        let g = read_graph("p graph 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
        assert_eq!(g, Graph::complete(3));
        assert_eq!(read_graph("c a loop\np graph 1 1\n\ne 1 1").unwrap(), Graph::loop_vertex());
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("e 1 2", 1),
            ("p graph 2 1\ne 1 3", 2),
            ("p graph 2 2\ne 1 2\ne 2 1", 3),
            ("p graph 2 1\ne 1 x", 2),
            ("p graph 2 2\ne 1 2", 1),
            ("p graph 2 1\ne 1 2\nq", 3),
        ];
        for (text, line) in cases {
            match read_graph(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn structures() {
        let text = "p struct 2 2\nr LE 2 3\nt 1 1\nt 1 2\nt 2 2\nr ZERO 1 1\nt 1\n";
        let s = read_struct(text).unwrap();
        assert_eq!(s.relations().len(), 2);
        assert!(s.relations()[0].contains(&[0, 1]));
        assert_eq!(read_struct(&write_struct(&s)).unwrap(), s);
        assert!(read_struct("p struct 2 1\nr R 2 1\nt 1 3").is_err());
        assert!(read_struct("p struct 2 2\nr R 1 1\nt 1").is_err());
        assert!(read_struct("p struct 2 1\nr R 1 2\nt 1").is_err());
    }

    #[test]
    fn gadget_trailer() {
        let text = "p graph 5 2\ne 1 5\ne 4 5\nm 1 2 3 4\nd 4 5\n";
        let g = read_gadget(text).unwrap();
        assert_eq!(g.marks, [0, 1, 2, 3]);
        assert_eq!(g.d, (3, 4));
        assert_eq!(write_gadget(&g), text);
        assert!(read_gadget("p graph 5 1\ne 1 5\nm 1 2 3 4\n").is_err());
        assert!(read_gadget("p graph 5 1\ne 1 5\nm 1 2 3 4\nd 2 3\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..8, edges in proptest::collection::vec((0usize..8, 0usize..8), 0..20)) {
            let g = Graph::new(n, edges.into_iter().filter(|&(u, v)| u < n && v < n)).unwrap();
            let text = write_graph(&g);
            prop_assert_eq!(read_graph(&text).unwrap(), g);
            prop_assert_eq!(write_graph(&read_graph(&text).unwrap()), text);
        }
    }
}
