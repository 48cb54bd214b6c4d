use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use heightone::chains::{self, gadget::Gadget, GadgetViolation};
use heightone::conditions::{self, HeightOneCondition};
use heightone::format::{read_gadget, read_graph, read_struct, write_gadget, write_graph};
use heightone::indicator::{self, FunctionTable, IndicatorLimits, Satisfaction};
use heightone::solver::{self, hom_instance, replay};
use heightone::{Graph, RelStructure};
use serde_json::{json, Value};

use crate::envelope::{Envelope, Invocation};
use crate::CliError;

pub fn graph(inv: &Invocation, role: &str) -> Result<Graph, CliError> {
    Ok(read_graph(inv.text(role))?)
}

/// A template file in either the struct or the graph format.
pub fn template(inv: &Invocation, role: &str) -> Result<RelStructure, CliError> {
    let text = inv.text(role);
    let is_graph = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('c'))
        .is_some_and(|l| l.split_whitespace().nth(1) == Some("graph"));
    if is_graph {
        Ok(RelStructure::from_graph(&read_graph(text)?))
    } else {
        Ok(read_struct(text)?)
    }
}

pub fn condition(inv: &Invocation, role: &str) -> Result<HeightOneCondition, CliError> {
    serde_json::from_str(inv.text(role)).map_err(|e| CliError::Input(format!("{role}: {e}")))
}

pub fn gadget(inv: &Invocation, role: &str) -> Result<Gadget, CliError> {
    Ok(read_gadget(inv.text(role))?)
}

/// A 1-based `u,v` pair from the command line, as 0-based vertices.
pub fn parse_edge(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Input(format!("expected an edge `u,v` with 1-based vertices, got {text:?}"));
    let (u, v) = text.split_once(',').ok_or_else(bad)?;
    let u: usize = u.trim().parse().map_err(|_| bad())?;
    let v: usize = v.trim().parse().map_err(|_| bad())?;
    if u == 0 || v == 0 {
        return Err(bad());
    }
    Ok((u - 1, v - 1))
}

pub fn limits(inv: &Invocation) -> Result<IndicatorLimits, CliError> {
    let max_vars: u64 = inv.get("max_vars")?;
    Ok(IndicatorLimits { max_vars: max_vars as u128, ..IndicatorLimits::default() })
}

fn to_value(x: impl serde::Serialize) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn yes_no(found: bool) -> &'static str {
    if found {
        "yes"
    } else {
        "no"
    }
}

/// Run a command and build its envelope.
pub fn run(inv: &Invocation) -> Result<Envelope, CliError> {
    let env = |answer: &str, witness: Value| Ok(inv.envelope(answer, witness));
    match inv.command.as_str() {
        "sigma" => env("value", to_value(conditions::sigma_of_graph(&graph(inv, "graph")?))),
        "qnu" => env("value", to_value(conditions::sigma_qnu(inv.get("n")?)?)),
        "trivial" => match conditions::is_trivial(&condition(inv, "condition")?) {
            Some(w) => env("yes", to_value(w)),
            None => env("no", Value::Null),
        },
        "combine" => env("value", to_value(conditions::combine(&condition(inv, "a")?, &condition(inv, "b")?))),
        "hom" => {
            let (g, h) = (graph(inv, "source")?, graph(inv, "target")?);
            match solver::find_hom(&g, &h) {
                Some(map) => env("yes", json!({ "map": map })),
                None => env("no", json!({ "digest": hom_instance(&g, &h).digest() })),
            }
        }
        "color3" => {
            let g = graph(inv, "graph")?;
            match solver::three_color(&g) {
                Some(coloring) => env("yes", json!({ "coloring": coloring })),
                None => env("no", json!({ "digest": hom_instance(&g, &Graph::complete(3)).digest() })),
            }
        }
        "satisfies" => {
            let (b, c) = (template(inv, "template")?, condition(inv, "condition")?);
            match indicator::satisfies_with(&b, &c, &limits(inv)?)? {
                Satisfaction::Satisfied { tables } => env("yes", json!({ "tables": tables })),
                Satisfaction::Exhausted { digest } => env("no", json!({ "digest": digest })),
            }
        }
        "fgraph" => env("value", to_value(indicator::build_f_graph(&template(inv, "template")?, inv.get("max_domain")?)?)),
        "minion-p" => {
            let (f, coloring) = indicator::minion_hom_to_p(&template(inv, "template")?, inv.get("max_domain")?)?;
            let found = coloring.is_some();
            let witness = match coloring {
                Some(c) => json!({ "fgraph": f, "coloring": c }),
                None => json!({ "fgraph": f, "digest": hom_instance(&f.graph(), &Graph::complete(3)).digest() }),
            };
            env(yes_no(found), witness)
        }
        "qnu-check" => {
            let (g, h) = (graph(inv, "pattern")?, graph(inv, "host")?);
            let max_vertices: u64 = inv.get("max_vertices")?;
            let check = indicator::qnu_quotient_check(&g, &h, inv.get("n")?, max_vertices as u128)?;
            let classes = check.classes.class_count();
            match check.map {
                Some(map) => {
                    let tuples: Vec<Vec<usize>> = map.iter().map(|&c| check.classes.representative_tuple(c)).collect();
                    env("yes", json!({ "classes": classes, "map": map, "representatives": tuples }))
                }
                None => env("no", json!({ "classes": classes, "digest": hom_instance(&g, &check.quotient).digest() })),
            }
        }
        "chain-tensor" => {
            let max_vertices: u64 = inv.get("max_vertices")?;
            let steps = chains::tensor_chain(inv.get("k")?, inv.get("max_n")?, max_vertices as usize)?;
            let out: Vec<Value> = steps
                .iter()
                .map(|s| json!({ "graph": write_graph(&s.graph), "coloring": s.coloring, "projection": s.projection }))
                .collect();
            env("value", Value::Array(out))
        }
        "chain-glue" => {
            let max_vertices: u64 = inv.get("max_vertices")?;
            let steps = chains::glue_chain(inv.get("k")?, &gadget(inv, "gadget")?, inv.get("max_n")?, max_vertices as usize)?;
            let out: Vec<Value> = steps
                .iter()
                .map(|s| {
                    json!({ "graph": write_graph(&s.graph), "d": [s.d.0, s.d.1], "coloring": s.coloring, "critical": s.critical })
                })
                .collect();
            env("value", Value::Array(out))
        }
        "critical" => {
            let g = graph(inv, "graph")?;
            match chains::find_critical(&g) {
                Some((h, e)) => {
                    let coloring = solver::three_color(&h.remove_edge(e.0, e.1)?).expect("critical edge");
                    env("yes", json!({ "graph": write_graph(&h), "edge": [e.0, e.1], "coloring": coloring }))
                }
                None => env("no", json!({ "coloring": solver::three_color(&g) })),
            }
        }
        "gadget-verify" => match chains::verify_gadget(&gadget(inv, "gadget")?) {
            Ok(cert) => env("yes", to_value(cert)),
            Err(violation) => env("no", to_value(violation)),
        },
        "gadget-search" => {
            let budget: u64 = inv.get("budget")?;
            match chains::search_gadget(inv.get("max_vertices")?, budget as usize)? {
                Some(g) => env("yes", json!({ "gadget": write_gadget(&g) })),
                None => env("no", Value::Null),
            }
        }
        "glue" => {
            let e = parse_edge(&inv.get::<String>("e")?)?;
            let f = parse_edge(&inv.get::<String>("f")?)?;
            let (w, d) = chains::glue(&graph(inv, "g")?, e, &graph(inv, "h")?, f, &gadget(inv, "gadget")?)?;
            env("value", json!({ "graph": write_graph(&w), "d": [d.0, d.1] }))
        }
        "sigma-perm" => env("value", to_value(chains::sigma_permutation(inv.get("i")?, inv.get("j")?)?)),
        "css" => {
            let (g, input) = (graph(inv, "pattern")?, graph(inv, "input")?);
            match chains::css_decide(&g, &input) {
                chains::CssVerdict::Accept => env("yes", json!({ "digest": hom_instance(&g, &input).digest() })),
                chains::CssVerdict::Reject { map } => env("no", json!({ "map": map })),
            }
        }
        "growth" => {
            let sizes: Vec<u64> = inv.get("sizes")?;
            env("value", to_value(chains::growth_g(&sizes, inv.get("k_max")?)?))
        }
        other => Err(CliError::Input(format!("unknown command {other}"))),
    }
}

/// Write chain steps as `step-<n>.graph` and `step-<n>.json` into `dir`.
pub fn write_chain(dir: &Path, steps: &Value) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for (i, step) in steps.as_array().into_iter().flatten().enumerate() {
        let text = step["graph"].as_str().unwrap_or_default();
        fs::write(dir.join(format!("step-{}.graph", i + 1)), text).map_err(io)?;
        let mut cert = step.clone();
        cert.as_object_mut().map(|o| o.remove("graph"));
        let json = serde_json::to_string_pretty(&cert).expect("serializable");
        fs::write(dir.join(format!("step-{}.json", i + 1)), json + "\n").map_err(io)?;
    }
    Ok(())
}

/// Check a `yes` witness without searching, where the answer allows it.
/// Returns a description of the first problem found.
pub fn check_witness(inv: &Invocation, env: &Envelope) -> Result<Option<String>, CliError> {
    let w = &env.witness;
    let parse = |v: &Value| -> Result<Vec<usize>, CliError> {
        serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("witness: {e}")))
    };
    let fail = |ok: bool, what: &str| Ok(if ok { None } else { Some(what.to_string()) });
    match inv.command.as_str() {
        "trivial" => {
            let pw: conditions::ProjectionWitness =
                serde_json::from_value(w.clone()).map_err(|e| CliError::Input(format!("witness: {e}")))?;
            fail(pw.validate(&condition(inv, "condition")?).is_ok(), "projections violate an identity")
        }
        "hom" => {
            let map = parse(&w["map"])?;
            fail(replay::check_homomorphism(&graph(inv, "source")?, &graph(inv, "target")?, &map), "not a homomorphism")
        }
        "color3" => fail(replay::check_coloring(&graph(inv, "graph")?, &parse(&w["coloring"])?, 3), "not a 3-colouring"),
        "satisfies" => {
            let tables: BTreeMap<String, FunctionTable> =
                serde_json::from_value(w["tables"].clone()).map_err(|e| CliError::Input(format!("witness: {e}")))?;
            let ok = indicator::validate_tables(&template(inv, "template")?, &condition(inv, "condition")?, &tables);
            fail(ok.is_ok(), "tables fail the polymorphism or identity check")
        }
        "qnu-check" => {
            let (g, h) = (graph(inv, "pattern")?, graph(inv, "host")?);
            let (quotient, _) = heightone::graph::qnu_quotient(&h, inv.get("n")?)?;
            fail(replay::check_homomorphism(&g, &quotient, &parse(&w["map"])?), "not a homomorphism into the quotient")
        }
        "critical" => {
            let g = graph(inv, "graph")?;
            let h = read_graph(w["graph"].as_str().unwrap_or_default())?;
            let e = parse(&w["edge"])?;
            let sub = h.vertex_count() == g.vertex_count() && h.edges().iter().all(|&(u, v)| g.has_edge(u, v));
            if !sub || e.len() != 2 || !h.has_edge(e[0], e[1]) {
                return fail(false, "not a subgraph with the given edge");
            }
            let colorable = replay::check_coloring(&h.remove_edge(e[0], e[1])?, &parse(&w["coloring"])?, 3);
            // Non-colourability of the subgraph is an exhaustion claim.
            fail(colorable && solver::three_color(&h).is_none(), "edge is not critical")
        }
        "gadget-verify" => {
            let cert = serde_json::from_value(w.clone()).map_err(|e| CliError::Input(format!("witness: {e}")))?;
            fail(chains::gadget::check_certificate(&gadget(inv, "gadget")?, &cert), "certificate does not check")
        }
        "gadget-search" => {
            let g = read_gadget(w["gadget"].as_str().unwrap_or_default())?;
            fail(chains::verify_gadget(&g).is_ok(), "returned gadget fails verification")
        }
        "css" => fail(
            replay::check_homomorphism(&graph(inv, "pattern")?, &graph(inv, "input")?, &parse(&w["map"])?),
            "not a homomorphism",
        ),
        _ => Ok(Some("no witness check for this answer".into())),
    }
}

/// How `verify` treats an answer of a command.
pub enum Check {
    /// Recompute and compare the whole envelope.
    Recompute,
    /// Check the witness directly.
    Witness,
}

pub fn check_kind(command: &str, answer: &str) -> Check {
    let witness_answer = match command {
        "trivial" | "hom" | "color3" | "satisfies" | "qnu-check" | "critical" | "gadget-verify" | "gadget-search" => "yes",
        "css" => "no",
        _ => return Check::Recompute,
    };
    if answer == witness_answer {
        Check::Witness
    } else {
        Check::Recompute
    }
}

/// For a `no` from gadget-verify: the counterexample itself, checked where
/// possible without search.
pub fn check_violation(inv: &Invocation, env: &Envelope) -> Result<Option<String>, CliError> {
    let g = gadget(inv, "gadget")?;
    let v: GadgetViolation =
        serde_json::from_value(env.witness.clone()).map_err(|e| CliError::Input(format!("witness: {e}")))?;
    let [x, x1, y, y1] = g.marks;
    let ok = match v {
        GadgetViolation::P1 { coloring } => {
            replay::check_coloring(&g.graph, &coloring, 3)
                && (coloring[x] != coloring[x1]) == (coloring[y] != coloring[y1])
        }
        GadgetViolation::P2 { boundary } => {
            chains::gadget::extend_boundary(&g.graph, g.marks, boundary).is_none()
                && (boundary[0] != boundary[1]) != (boundary[2] != boundary[3])
        }
        GadgetViolation::P3 { boundary } => {
            let without = g.graph.remove_edge(g.d.0, g.d.1)?;
            chains::gadget::extend_boundary(&without, g.marks, boundary).is_none()
                && boundary[0] == boundary[1]
                && boundary[2] == boundary[3]
        }
    };
    Ok(if ok { None } else { Some("counterexample does not check".into()) })
}
