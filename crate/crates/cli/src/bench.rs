//! Seeded benchmark suites. Instances run in parallel with one solver each;
//! rows come out in instance order.

use std::io::Write;
use std::time::Instant;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::{json, Value};

use isokit::apps::graph_iso_bounded_degree;
use isokit::luks::{iso_result_json, Solver, SolverConfig, Stats};
use isokit::partition::PartitionSequence;
use isokit::perm::Coset;
use isokit::suites::{gi_suite, si_suite};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    /// String isomorphism over mixed small groups
    Si,
    /// All same-order pairs of connected graphs of maximum degree 3
    Gi,
}

pub struct Options {
    pub seed: u64,
    pub count: usize,
    pub max_n: usize,
    pub json: bool,
}

pub const CSV_HEADER: &str = "instance_id,n,d,group_order,branch,calls,max_depth,millis";

struct Row {
    id: usize,
    n: usize,
    d: usize,
    group_order: String,
    stats: Stats,
    millis: u128,
    result: Option<Coset>,
}

impl Row {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.id,
            self.n,
            self.d,
            self.group_order,
            self.stats.dominant_branch(),
            self.stats.calls,
            self.stats.max_depth,
            self.millis
        )
    }

    /// Everything but the timing, so repeated runs compare byte for byte.
    fn record(&self) -> Value {
        json!({
            "instance_id": self.id,
            "n": self.n,
            "d": self.d,
            "group_order": self.group_order,
            "branch": self.stats.dominant_branch(),
            "calls": self.stats.calls,
            "max_depth": self.stats.max_depth,
            "result": iso_result_json(self.result.as_ref()),
        })
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_millis())
}

fn si_rows(opts: &Options, cfg: &SolverConfig) -> Result<Vec<Row>> {
    let cases = si_suite(opts.seed, opts.count);
    isokit::par::map(&cases, |c| {
        let solver = Solver::new(cfg.clone());
        let seq = PartitionSequence::auto(c.group.clone())?;
        let (result, millis) = timed(|| solver.string_iso_main(&seq, &c.x, &c.y));
        Ok(Row { id: c.id, n: c.group.degree(), d: seq.d, group_order: c.group.order().to_string(), stats: solver.stats(), millis, result: result? })
    })
    .into_iter()
    .collect()
}

/// `group_order` is the size of the isomorphism coset, 0 when empty.
fn gi_rows(opts: &Options, cfg: &SolverConfig) -> Result<Vec<Row>> {
    let cases = gi_suite(opts.seed, opts.max_n, 3);
    isokit::par::map(&cases, |c| {
        let solver = Solver::new(cfg.clone());
        let (result, millis) = timed(|| graph_iso_bounded_degree(&c.first, &c.second, &solver));
        let result = result?;
        let group_order = result.as_ref().map_or_else(|| "0".to_string(), |r| r.size().to_string());
        Ok(Row { id: c.id, n: c.first.order(), d: c.first.max_degree(), group_order, stats: solver.stats(), millis, result })
    })
    .into_iter()
    .collect()
}

pub fn run(suite: Suite, opts: &Options, cfg: &SolverConfig) -> Result<()> {
    let rows = match suite {
        Suite::Si => si_rows(opts, cfg)?,
        Suite::Gi => gi_rows(opts, cfg)?,
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    if opts.json {
        for r in &rows {
            writeln!(out, "{}", serde_json::to_string(&r.record())?)?;
        }
    } else {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &rows {
            writeln!(out, "{}", r.csv())?;
        }
    }
    out.flush()?;
    Ok(())
}
