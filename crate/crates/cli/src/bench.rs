//! Cross-solver benchmark over a corpus.
//!
//! Each instance runs the oracle, fes when the feedback edge number is at
//! most 3, vi when the vertex integrity is at most 3, twdp with `ν = |W|`,
//! and block color coding with `k` equal to the oracle witness length. The
//! report lists the costs and is byte-identical across runs; wall times go
//! to the diagnostic stream.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use dwrp::colorcoding::{solve_k_occurrences, ColorCodingConfig, FamilyMode};
use dwrp::fes::{solve_fes_with_stats, FesStats};
use dwrp::oracle::oracle_solve;
use dwrp::structparams::{feedback_edge_set, vertex_integrity, UnderlyingGraph};
use dwrp::twdp::solve_twdp;
use dwrp::vi::{solve_vi_with, ViConfig, ViStats};
use dwrp::{Instance, Result, Solution};

use crate::corpus::CorpusEntry;
use crate::solve::Algo;

pub const BENCH_FES_MAX: usize = 3;
pub const BENCH_VI_MAX: usize = 3;

pub const BENCH_ALGOS: [Algo; 5] = [Algo::Oracle, Algo::Fes, Algo::Vi, Algo::Twdp, Algo::Colorcoding];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Skipped,
    Cost(Option<u64>),
    /// The solver failed or its witness did not check out.
    Failed(String),
}

impl Outcome {
    fn text(&self) -> String {
        match self {
            Outcome::Skipped => "-".into(),
            Outcome::Cost(Some(c)) => c.to_string(),
            Outcome::Cost(None) => "INF".into(),
            Outcome::Failed(_) => "ERR".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub name: String,
    /// In `BENCH_ALGOS` order.
    pub outcomes: Vec<Outcome>,
    pub oracle: Option<Solution>,
    pub fes: Option<(usize, FesStats)>,
    pub vi: Option<(usize, ViStats)>,
    pub cc_k: Option<usize>,
    pub times: Vec<Duration>,
}

impl BenchRecord {
    /// All solvers that ran returned the same cost.
    pub fn agrees(&self) -> bool {
        let mut costs = self.outcomes.iter().filter(|o| **o != Outcome::Skipped);
        let Some(first) = costs.next() else { return true };
        matches!(first, Outcome::Cost(_)) && costs.all(|o| o == first)
    }
}

fn checked(inst: &Instance, r: Result<Solution>) -> (Outcome, Option<Solution>) {
    match r {
        Ok(s) if s.witness_ok(inst) => (Outcome::Cost(s.cost()), Some(s)),
        Ok(_) => (Outcome::Failed("witness does not validate".into()), None),
        Err(e) => (Outcome::Failed(e.to_string()), None),
    }
}

pub fn bench_instance(entry: &CorpusEntry) -> BenchRecord {
    let inst = &entry.instance;
    let g = UnderlyingGraph::of(inst);
    let mut outcomes = Vec::new();
    let mut times = Vec::new();
    let mut rec = BenchRecord {
        name: entry.name.clone(),
        outcomes: Vec::new(),
        oracle: None,
        fes: None,
        vi: None,
        cc_k: None,
        times: Vec::new(),
    };
    for algo in BENCH_ALGOS {
        let t = Instant::now();
        let outcome = match algo {
            Algo::Oracle => {
                let (o, s) = checked(inst, oracle_solve(inst));
                rec.oracle = s;
                o
            }
            Algo::Fes => {
                let k = feedback_edge_set(&g).len();
                if k > BENCH_FES_MAX || inst.has_parallel_arcs() {
                    Outcome::Skipped
                } else {
                    match solve_fes_with_stats(inst) {
                        Ok((s, st)) => {
                            rec.fes = Some((k, st));
                            checked(inst, Ok(s)).0
                        }
                        Err(e) => Outcome::Failed(e.to_string()),
                    }
                }
            }
            Algo::Vi => match vertex_integrity(&g, BENCH_VI_MAX) {
                None => Outcome::Skipped,
                Some(m) => match solve_vi_with(inst, &m, ViConfig::default()) {
                    Ok((s, st)) => {
                        rec.vi = Some((m.k, st));
                        checked(inst, Ok(s)).0
                    }
                    Err(e) => Outcome::Failed(e.to_string()),
                },
            },
            Algo::Twdp => checked(inst, solve_twdp(inst, None)).0,
            Algo::Colorcoding => match rec.oracle.as_ref().and_then(|s| s.walk()).map(|w| w.len()) {
                Some(k) => {
                    rec.cc_k = Some(k);
                    checked(inst, solve_k_occurrences(inst, ColorCodingConfig::new(k, FamilyMode::Block))).0
                }
                None => Outcome::Skipped,
            },
            Algo::Auto => unreachable!(),
        };
        times.push(t.elapsed());
        outcomes.push(outcome);
    }
    rec.outcomes = outcomes;
    rec.times = times;
    rec
}

pub fn report_header() -> String {
    let names: Vec<&str> = BENCH_ALGOS.iter().map(|a| a.name()).collect();
    format!("instance {} status\n", names.join(" "))
}

pub fn report_line(r: &BenchRecord) -> String {
    let mut line = r.name.clone();
    for o in &r.outcomes {
        let _ = write!(line, " {}", o.text());
    }
    line.push_str(if r.agrees() { " ok\n" } else { " MISMATCH\n" });
    line
}

pub fn report_summary(records: &[BenchRecord]) -> String {
    let bad = records.iter().filter(|r| !r.agrees()).count();
    let failed = records.iter().filter(|r| r.outcomes.iter().any(|o| matches!(o, Outcome::Failed(_)))).count();
    format!("instances {} mismatches {bad} failures {failed}\n", records.len())
}

/// Runs every entry in order, calling `each` after every record.
pub fn run_bench(entries: &[CorpusEntry], mut each: impl FnMut(&BenchRecord)) -> Vec<BenchRecord> {
    entries
        .iter()
        .map(|e| {
            let r = bench_instance(e);
            each(&r);
            r
        })
        .collect()
}

/// The full primary-stream report.
pub fn render_report(records: &[BenchRecord]) -> String {
    let mut out = report_header();
    for r in records {
        out.push_str(&report_line(r));
    }
    out.push_str(&report_summary(records));
    out
}

/// Total wall time per solver, for the diagnostic stream.
pub fn timing_summary(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    for (i, a) in BENCH_ALGOS.iter().enumerate() {
        let total: Duration = records.iter().map(|r| r.times[i]).sum();
        let ran = records.iter().filter(|r| r.outcomes[i] != Outcome::Skipped).count();
        let _ = writeln!(out, "{:<12} runs {:>6} wall {:>9.3}s", a.name(), ran, total.as_secs_f64());
    }
    out
}
