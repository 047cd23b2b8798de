//! `isokit` command line: graph and string isomorphism, sequence validation,
//! reductions, certificates and benchmark suites.
//!
//! Exit codes: 0 isomorphic (or success), 1 not isomorphic (or invalid
//! sequence), 2 error.

mod bench;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use isokit::apps::{graph_iso_bounded_degree, Graph};
use isokit::certs::{local_certificates, CertOutcome, GiantRep};
use isokit::luks::{iso_result_json, Solver, SolverConfig, StringInstance, Symbol};
use isokit::partition::{validate_almost_d_ary, PartitionSequence};
use isokit::perm::{Coset, GeneratorList, GroupHom, Perm};
use isokit::reduction::{reduce_full, reduce_step_one, reduce_step_two};

#[derive(Parser, Debug)]
#[command(name = "isokit", version, about = "Isomorphism of strings under permutation groups, and of bounded-degree graphs")]
struct Cli {
    /// Machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized suites
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Groups up to this order are solved by enumeration
    #[arg(long, global = true)]
    brute_cap: Option<u64>,
    /// Largest giant degree handled by certificates
    #[arg(long, global = true)]
    d_cap: Option<usize>,
    #[arg(long, global = true)]
    c1: Option<f64>,
    #[arg(long, global = true)]
    c2: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Isomorphism of two graphs (edge list or JSON)
    Gi { first: PathBuf, second: PathBuf },
    /// String isomorphism instance (JSON)
    Si { instance: PathBuf },
    /// Automorphism group of a graph
    Aut { graph: PathBuf },
    /// Almost-d-ary report for a group and partition sequence (JSON)
    ValidateSeq { input: PathBuf },
    /// Change of action on a string instance
    Reduce {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Step::Full)]
        step: Step,
    },
    /// Local certificate of a test set under a giant representation (JSON)
    Certify { input: PathBuf },
    /// Seeded benchmark suite: CSV of sizes, recursion stats and times, or
    /// with --json the per-instance results without timings
    Bench {
        #[arg(long, value_enum)]
        suite: bench::Suite,
        /// Number of string instances
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Largest graph order in the corpus
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Step {
    One,
    Two,
    Full,
}

/// Positive or negative answer of a successful run.
enum Verdict {
    Yes,
    No,
}

impl Cli {
    fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(b) = self.brute_cap {
            cfg.brute_cap = b;
        }
        if let Some(d) = self.d_cap {
            cfg.d_cap = d;
        }
        if let Some(c) = self.c1 {
            cfg.c1 = c;
        }
        if let Some(c) = self.c2 {
            cfg.c2 = c;
        }
        cfg
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("values serialize"));
}

/// ISO/NONISO line, or the result record under `--json`.
fn report_iso(cli: &Cli, r: Option<&Coset>) -> Verdict {
    if cli.json {
        print_json(&iso_result_json(r));
    } else {
        println!("{}", if r.is_some() { "ISO" } else { "NONISO" });
        if let Some(c) = r {
            println!("size {}", c.size());
            println!("rep {}", c.rep);
        }
    }
    if r.is_some() {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

fn gi(cli: &Cli, first: &Path, second: &Path) -> Result<Verdict> {
    let (g1, g2) = (read_graph(first)?, read_graph(second)?);
    let solver = Solver::new(cli.solver_config());
    let r = graph_iso_bounded_degree(&g1, &g2, &solver)?;
    Ok(report_iso(cli, r.as_ref()))
}

fn si(cli: &Cli, path: &Path) -> Result<Verdict> {
    let inst = StringInstance::from_json_value(&read_json(path)?)?;
    let solver = Solver::new(cli.solver_config());
    let r = inst.solve(&solver)?;
    Ok(report_iso(cli, r.as_ref()))
}

fn aut(cli: &Cli, path: &Path) -> Result<Verdict> {
    let g = read_graph(path)?;
    let solver = Solver::new(cli.solver_config());
    let c = graph_iso_bounded_degree(&g, &g, &solver)?.ok_or_else(|| anyhow!("graph not isomorphic to itself"))?;
    let gens: Vec<String> = c.subgroup.strong_generators().iter().map(ToString::to_string).collect();
    if cli.json {
        print_json(&json!({"order": c.subgroup.order().to_string(), "aut_gens": gens}));
    } else {
        println!("ISO");
        println!("order {}", c.subgroup.order());
        for g in gens {
            println!("gen {g}");
        }
    }
    Ok(Verdict::Yes)
}

/// `{"group": {..}, "d"?, "sequence": [..]}` or with `"sequence": {"d", "sequence"}`.
fn read_sequence(v: &Value) -> Result<PartitionSequence> {
    let group = GeneratorList::from_json_value(v.get("group").ok_or_else(|| anyhow!("missing group"))?)?.to_group();
    let (chain, d) = match v.get("sequence") {
        Some(s @ Value::Object(_)) => PartitionSequence::chain_from_json_value(s, None)?,
        Some(_) => PartitionSequence::chain_from_json_value(v, None)?,
        None => bail!("missing sequence"),
    };
    Ok(PartitionSequence::new(group, chain, d)?)
}

fn validate_seq(cli: &Cli, path: &Path) -> Result<Verdict> {
    let seq = read_sequence(&read_json(path)?)?;
    let report = validate_almost_d_ary(&seq)?;
    if cli.json {
        print_json(&serde_json::to_value(&report)?);
    } else {
        println!("{}", if report.valid { "VALID" } else { "INVALID" });
        for v in &report.violations {
            let block: Vec<String> = v.block.iter().map(ToString::to_string).collect();
            println!("level {} block {{{}}}: {}", v.level, block.join(","), v.reason);
        }
    }
    Ok(if report.valid { Verdict::Yes } else { Verdict::No })
}

fn reduce(cli: &Cli, path: &Path, step: Step) -> Result<Verdict> {
    let inst = StringInstance::from_json_value(&read_json(path)?)?;
    let cfg = cli.solver_config().reduction();
    let aug = match step {
        Step::One => reduce_step_one(&inst.seq, &inst.x, &inst.y, &cfg)?,
        Step::Two => reduce_step_two(&inst.seq, &inst.x, &inst.y)?,
        Step::Full => reduce_full(&inst.seq, &inst.x, &inst.y, &cfg)?,
    };
    let v = aug.to_json_value();
    if cli.json {
        print_json(&v);
    } else {
        println!("{}", serde_json::to_string_pretty(&v)?);
    }
    Ok(Verdict::Yes)
}

/// Symbols numbered in order of first appearance.
fn encode_string(v: &Value) -> Result<Vec<Symbol>> {
    let items: Vec<String> = match v {
        Value::String(s) => s.chars().map(String::from).collect(),
        Value::Array(a) => a.iter().map(|s| s.as_str().map(String::from).unwrap_or_else(|| s.to_string())).collect(),
        _ => bail!("x must be text or an array"),
    };
    let mut seen: Vec<&String> = Vec::new();
    Ok(items
        .iter()
        .map(|s| match seen.iter().position(|t| *t == s) {
            Some(i) => i as Symbol,
            None => {
                seen.push(s);
                (seen.len() - 1) as Symbol
            }
        })
        .collect())
}

fn one_based(v: &Value, n: usize, what: &str) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| anyhow!("{what} must be an array"))?
        .iter()
        .map(|p| match p.as_u64() {
            Some(p) if p >= 1 && p as usize <= n => Ok(p as usize - 1),
            _ => Err(anyhow!("bad point {p} in {what}")),
        })
        .collect()
}

/// `{"group", "x", "phi": {"k", "images": [one per generator]}, "test_set", "sequence"?}`.
fn certify(cli: &Cli, path: &Path) -> Result<Verdict> {
    let v = read_json(path)?;
    let group = GeneratorList::from_json_value(v.get("group").ok_or_else(|| anyhow!("missing group"))?)?.to_group();
    let n = group.degree();
    let x = encode_string(v.get("x").ok_or_else(|| anyhow!("missing x"))?)?;
    let phi = v.get("phi").ok_or_else(|| anyhow!("missing phi"))?;
    let k = phi.get("k").and_then(Value::as_u64).ok_or_else(|| anyhow!("missing phi.k"))? as usize;
    let images = phi
        .get("images")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("missing phi.images"))?
        .iter()
        .map(|s| Perm::parse(k, s.as_str().ok_or_else(|| anyhow!("images are cycle strings"))?).map_err(Into::into))
        .collect::<Result<Vec<_>>>()?;
    let t = one_based(v.get("test_set").ok_or_else(|| anyhow!("missing test_set"))?, k, "test_set")?;
    let seq = if v.get("sequence").is_some() { read_sequence(&v)? } else { PartitionSequence::auto(group.clone())? };
    let rep = GiantRep::new(GroupHom::new(group, k, images)?)?;
    if x.len() != n {
        bail!("x has length {}, domain has {n} points", x.len());
    }
    let solver = Solver::new(cli.solver_config());
    let cert = local_certificates(&solver, &seq, &rep, &x, &t)?;
    if cli.json {
        print_json(&cert.to_json_value());
    } else {
        let (kind, g) = match &cert.outcome {
            CertOutcome::Full(g) => ("FULL", g),
            CertOutcome::NonFull(g) => ("NONFULL", g),
        };
        println!("{kind}");
        println!("order {}", g.order());
        for p in g.generators() {
            println!("gen {p}");
        }
    }
    Ok(Verdict::Yes)
}

fn run(cli: &Cli) -> Result<Verdict> {
    match &cli.command {
        Command::Gi { first, second } => gi(cli, first, second),
        Command::Si { instance } => si(cli, instance),
        Command::Aut { graph } => aut(cli, graph),
        Command::ValidateSeq { input } => validate_seq(cli, input),
        Command::Reduce { instance, step } => reduce(cli, instance, *step),
        Command::Certify { input } => certify(cli, input),
        Command::Bench { suite, count, max_n } => {
            bench::run(*suite, &bench::Options { seed: cli.seed, count: *count, max_n: *max_n, json: cli.json }, &cli.solver_config())?;
            Ok(Verdict::Yes)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Verdict::Yes) => ExitCode::SUCCESS,
        Ok(Verdict::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
