//! `heightone`: command-line access to the library's decision procedures.
//!
//! Every command prints one JSON envelope on standard output. Exit codes:
//! 0 when the command answered (either way), 2 for invalid input, 3 when a
//! resource guard refused the computation.

mod commands;
mod envelope;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use commands::{check_kind, Check};
use envelope::{Envelope, Invocation};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Guard(String),
}

impl From<heightone::Error> for CliError {
    fn from(e: heightone::Error) -> Self {
        match e {
            heightone::Error::ResourceGuard { .. } => CliError::Guard(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "heightone", version, about = "Height-1 conditions of graphs and templates")]
struct Cli {
    /// Cap on indicator-instance variables.
    #[arg(long, global = true, default_value_t = 1 << 22)]
    max_vars: u64,
    /// Cap on vertex and tuple counts of constructed graphs.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    max_vertices: u64,
    /// Synthesis rounds for gadget-search.
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// The condition of a graph.
    Sigma { graph: PathBuf },
    /// The quasi near-unanimity condition of arity N.
    Qnu { n: usize },
    /// Decide whether a condition is satisfied by projections.
    Trivial { condition: PathBuf },
    /// A condition implied by both inputs.
    Combine { a: PathBuf, b: PathBuf },
    /// Search for a graph homomorphism.
    Hom { source: PathBuf, target: PathBuf },
    /// Search for a 3-colouring.
    Color3 { graph: PathBuf },
    /// Decide whether a template's polymorphisms satisfy a condition.
    Satisfies { template: PathBuf, condition: PathBuf },
    /// The F-graph of a template.
    Fgraph {
        template: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_domain: usize,
    },
    /// Decide whether a template's clone maps to the projections.
    MinionP {
        template: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_domain: usize,
    },
    /// Map PATTERN into the quasi near-unanimity quotient of HOST^N.
    QnuCheck { pattern: PathBuf, host: PathBuf, n: usize },
    /// The tensor chain of the first K non-3-colourable graphs.
    ChainTensor {
        k: usize,
        max_n: usize,
        /// Also write each step into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The glued chain of the first K non-3-colourable graphs.
    ChainGlue {
        k: usize,
        gadget: PathBuf,
        max_n: usize,
        /// Also write each step into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A non-3-colourable subgraph with a critical edge.
    Critical { graph: PathBuf },
    /// Check the three gadget properties.
    GadgetVerify { gadget: PathBuf },
    /// Search for a gadget on at most MAX_VERTICES vertices.
    GadgetSearch { max_vertices: usize },
    /// Glue G along E and H along F through a gadget; edges as `u,v`, 1-based.
    Glue { g: PathBuf, e: String, h: PathBuf, f: String, gadget: PathBuf },
    /// The argument permutation relating patterns I and J.
    SigmaPerm { i: usize, j: usize },
    /// Decide whether INPUT avoids all homomorphic images of PATTERN.
    Css { pattern: PathBuf, input: PathBuf },
    /// The growth schedule for the given graph sizes.
    Growth {
        #[arg(required = true)]
        sizes: Vec<u64>,
        #[arg(long, default_value_t = 1 << 40)]
        k_max: u64,
    },
    /// Re-check an envelope against its input files.
    Verify { envelope: PathBuf, inputs: Vec<PathBuf> },
}

fn invocation(cli: &Cli) -> Result<Invocation, CliError> {
    use Command::*;
    let inv = |name: &str| Invocation::new(name);
    Ok(match &cli.command {
        Sigma { graph } => inv("sigma").input("graph", graph)?,
        Qnu { n } => inv("qnu").param("n", n),
        Trivial { condition } => inv("trivial").input("condition", condition)?,
        Combine { a, b } => inv("combine").input("a", a)?.input("b", b)?,
        Hom { source, target } => inv("hom").input("source", source)?.input("target", target)?,
        Color3 { graph } => inv("color3").input("graph", graph)?,
        Satisfies { template, condition } => inv("satisfies")
            .param("max_vars", cli.max_vars)
            .input("template", template)?
            .input("condition", condition)?,
        Fgraph { template, max_domain } => inv("fgraph").param("max_domain", max_domain).input("template", template)?,
        MinionP { template, max_domain } => {
            inv("minion-p").param("max_domain", max_domain).input("template", template)?
        }
        QnuCheck { pattern, host, n } => inv("qnu-check")
            .param("n", n)
            .param("max_vertices", cli.max_vertices)
            .input("pattern", pattern)?
            .input("host", host)?,
        ChainTensor { k, max_n, .. } => {
            inv("chain-tensor").param("k", k).param("max_n", max_n).param("max_vertices", cli.max_vertices)
        }
        ChainGlue { k, gadget, max_n, .. } => inv("chain-glue")
            .param("k", k)
            .param("max_n", max_n)
            .param("max_vertices", cli.max_vertices)
            .input("gadget", gadget)?,
        Critical { graph } => inv("critical").input("graph", graph)?,
        GadgetVerify { gadget } => inv("gadget-verify").input("gadget", gadget)?,
        GadgetSearch { max_vertices } => {
            inv("gadget-search").param("max_vertices", max_vertices).param("budget", cli.budget)
        }
        Glue { g, e, h, f, gadget } => inv("glue")
            .param("e", e)
            .param("f", f)
            .input("g", g)?
            .input("h", h)?
            .input("gadget", gadget)?,
        SigmaPerm { i, j } => inv("sigma-perm").param("i", i).param("j", j),
        Css { pattern, input } => inv("css").input("pattern", pattern)?.input("input", input)?,
        Growth { sizes, k_max } => inv("growth").param("sizes", sizes).param("k_max", k_max),
        Verify { .. } => unreachable!("handled separately"),
    })
}

/// Re-check `envelope` against `inputs`, given in the order of its roles.
fn verify(envelope_path: &Path, inputs: &[PathBuf]) -> Result<Envelope, CliError> {
    let text = std::fs::read_to_string(envelope_path)
        .map_err(|e| CliError::Input(format!("{}: {e}", envelope_path.display())))?;
    let claimed: Envelope =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", envelope_path.display())))?;
    if inputs.len() != claimed.inputs.len() {
        return Err(CliError::Input(format!(
            "envelope has {} inputs, {} given",
            claimed.inputs.len(),
            inputs.len()
        )));
    }
    let mut inv = Invocation { command: claimed.command.clone(), params: claimed.params.clone(), inputs: Vec::new() };
    for (digest, path) in claimed.inputs.iter().zip(inputs) {
        inv = inv.input(&digest.role, path)?;
    }
    let mut outer = Invocation::new("verify").param("checked", &claimed.command).input("envelope", envelope_path)?;
    outer.inputs.extend(inv.inputs.iter().cloned());

    let problem = if inv.digests() != claimed.inputs {
        Some("input digests differ".to_string())
    } else {
        match (check_kind(&claimed.command, &claimed.answer), claimed.answer.as_str()) {
            (Check::Witness, _) => commands::check_witness(&inv, &claimed)?,
            (Check::Recompute, "no") if claimed.command == "gadget-verify" => {
                commands::check_violation(&inv, &claimed)?
            }
            (Check::Recompute, _) => {
                let fresh = commands::run(&inv)?;
                if fresh.answer != claimed.answer {
                    Some(format!("recomputed answer is {}", fresh.answer))
                } else if fresh.witness != claimed.witness {
                    Some("recomputed witness differs".to_string())
                } else {
                    None
                }
            }
        }
    };
    let answer = if problem.is_none() { "yes" } else { "no" };
    Ok(outer.envelope(answer, json!({ "problem": problem })))
}

fn execute(cli: &Cli) -> Result<Envelope, CliError> {
    let Format::Json = cli.format;
    match &cli.command {
        Command::Verify { envelope, inputs } => verify(envelope, inputs),
        Command::ChainTensor { out, .. } | Command::ChainGlue { out, .. } => {
            let env = commands::run(&invocation(cli)?)?;
            if let Some(dir) = out {
                commands::write_chain(dir, &env.witness)?;
            }
            Ok(env)
        }
        _ => commands::run(&invocation(cli)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(env) => {
            println!("{}", serde_json::to_string_pretty(&env).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(CliError::Input(msg)) => {
            log::error!("{msg}");
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Guard(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
