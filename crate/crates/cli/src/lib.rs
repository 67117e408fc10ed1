//! Command-line front end: `solve`, `validate`, `params`, `gen` and `bench`.
//!
//! Results go to the primary stream, diagnostics to the diagnostic stream.
//! Exit codes: 0 success (and valid walks), 1 invalid walk or bench
//! mismatch, 2 parse or semantic errors, 3 resource limits, 4 internal
//! errors.

pub mod bench;
pub mod corpus;
pub mod solve;

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use dwrp::colorcoding::FamilyMode;
use dwrp::format::{parse_instance, parse_solution, serialize_instance, serialize_solution, vertices_to_walk, SolutionText};
use dwrp::hardness::{
    build_witness_walk, cds_brute_force, force_gadget_host, gen_cds_reduction, gen_cover_gadget, gen_random,
    parse_cds, RandomParams,
};
use dwrp::structparams::{exact_tree_decomposition, feedback_edge_set, vertex_integrity, UnderlyingGraph};
use dwrp::walk::validate_walk;
use dwrp::{Error, Instance, Solution, Violation};

use crate::solve::{choose_auto, solve_with, Algo, AlgoOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "dwrp", version, about = "Exact solvers for directed waypoint routing")]
pub struct Cli {
    /// Seed for randomized color coding and generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Abort `solve` after this many milliseconds (exit 3).
    #[arg(long, global = true)]
    pub time_limit_ms: Option<u64>,
    /// Suppress diagnostics.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance; prints `COST`/`WALK` or `INFEASIBLE`.
    Solve(SolveArgs),
    /// Check a solution file against an instance; exit 1 when invalid.
    Validate { instance: PathBuf, solution: PathBuf },
    /// Feedback edge number, vertex integrity and treewidth.
    Params {
        input: PathBuf,
        /// Largest vertex integrity searched for.
        #[arg(long, default_value_t = 6)]
        vi_limit: usize,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run every applicable solver over a corpus and compare costs.
    Bench {
        /// Directory of `.dwrp` files; the built-in corpus when omitted.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance file, `-` for standard input.
    pub input: PathBuf,
    /// `auto` estimates each solver's state space (oracle: multiplicity
    /// space; fes: 7^k (14k)^2; vi: (k+1)^(k^2) for vi <= 3; twdp:
    /// Bell(tw+1) (|W|+1)^(2(tw+1)) n) and runs the smallest.
    #[arg(long, value_enum, default_value_t = Algo::Auto)]
    pub algo: Algo,
    /// Occurrence bound for colorcoding.
    #[arg(long)]
    pub k: Option<usize>,
    /// Deterministic complete coloring family (the default).
    #[arg(long, conflicts_with = "delta")]
    pub exhaustive: bool,
    /// Randomized coloring with this failure probability.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Vertex-integrity modulator, e.g. `0,3`; computed when omitted.
    #[arg(long, value_delimiter = ',')]
    pub modulator: Option<Vec<usize>>,
    /// Visit bound for twdp; `|W|` when omitted.
    #[arg(long)]
    pub nu: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Seeded random instance.
    Random {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 5])]
        weights: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 3])]
        capacities: Vec<u64>,
        /// Probability that an arc is uncapacitated.
        #[arg(long, default_value_t = 0.5)]
        unbounded: f64,
        #[arg(long, default_value_t = 3)]
        waypoints: usize,
        /// Skip the Hamiltonian backbone.
        #[arg(long)]
        allow_disconnected: bool,
    },
    /// Force-p-traversals gadget hung off a two-cycle.
    Force {
        #[arg(long)]
        p: usize,
    },
    /// The cover gadget on its own, terminals and z as waypoints.
    Cover,
    /// Reduction of a capacitated dominating set instance.
    CdsReduction {
        input: PathBuf,
        /// Also write the witness walk here when the instance is a yes-instance.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Write the built-in benchmark corpus.
    Corpus {
        #[arg(long)]
        out: PathBuf,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    quiet: bool,
}

impl Io<'_> {
    fn diag(&mut self, msg: impl AsRef<str>) {
        if !self.quiet {
            let _ = writeln!(self.err, "{}", msg.as_ref());
        }
    }

    fn fail(&mut self, e: &Error) -> i32 {
        let _ = writeln!(self.err, "error: {e}");
        exit_code(e)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TooLarge(_) | Error::TooMany(_) => EXIT_LIMIT,
        Error::Internal(_) | Error::InfeasibleGuess(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn read_input(path: &Path) -> Result<String, Error> {
    let mut text = String::new();
    let r = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    r.map_err(|e| Error::Semantic(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn load_instance(path: &Path) -> Result<Instance, Error> {
    parse_instance(&read_input(path)?)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err, quiet: cli.quiet };
    match &cli.command {
        Command::Solve(a) => cmd_solve(&cli, a, &mut io),
        Command::Validate { instance, solution } => cmd_validate(instance, solution, &mut io),
        Command::Params { input, vi_limit } => cmd_params(input, *vi_limit, &mut io),
        Command::Gen(g) => cmd_gen(&cli, g, &mut io),
        Command::Bench { corpus } => cmd_bench(&cli, corpus.as_deref(), &mut io),
    }
}

fn cmd_solve(cli: &Cli, a: &SolveArgs, io: &mut Io) -> i32 {
    let inst = match load_instance(&a.input) {
        Ok(i) => i,
        Err(e) => return io.fail(&e),
    };
    let flags = a.k.is_some() || a.exhaustive || a.delta.is_some() || a.modulator.is_some() || a.nu.is_some();
    let mut algo = a.algo;
    if algo == Algo::Auto {
        if flags {
            return io.fail(&Error::Semantic("--algo auto takes no algorithm flags".into()));
        }
        let choice = choose_auto(&inst);
        let est: Vec<String> = choice.estimates.iter().map(|(a, e)| format!("{}={e:.1}", a.name())).collect();
        io.diag(format!("auto: {} (log10 estimates {})", choice.algo.name(), est.join(" ")));
        algo = choice.algo;
    }
    if let Some(d) = a.delta {
        if !(d > 0.0 && d < 1.0) {
            return io.fail(&Error::Semantic(format!("--delta {d} outside (0, 1)")));
        }
    }
    let opts = AlgoOptions {
        k: a.k,
        family: match a.delta {
            Some(delta) => FamilyMode::Randomized { seed: cli.seed, delta },
            None => FamilyMode::Block,
        },
        modulator: a.modulator.clone(),
        nu: a.nu,
    };
    let result = match cli.time_limit_ms {
        None => solve_with(&inst, algo, &opts),
        Some(ms) => {
            let (tx, rx) = mpsc::channel();
            let (inst2, opts2) = (inst.clone(), opts.clone());
            std::thread::spawn(move || {
                let _ = tx.send(solve_with(&inst2, algo, &opts2));
            });
            match rx.recv_timeout(Duration::from_millis(ms)) {
                Ok(r) => r,
                Err(_) => Err(Error::TooLarge(format!("time limit of {ms} ms reached"))),
            }
        }
    };
    let sol = match result {
        Ok(s) => s,
        Err(e) => return io.fail(&e),
    };
    if !sol.witness_ok(&inst) {
        return io.fail(&Error::Internal("solver returned a walk that does not validate".into()));
    }
    let text = match &sol {
        Solution::Optimal { cost, walk } => serialize_solution(&inst, Some((*cost, walk))),
        Solution::BudgetExceeded { cost, .. } => {
            io.diag(format!("optimum {cost} exceeds the budget {}", inst.budget().unwrap_or(0)));
            serialize_solution(&inst, None)
        }
        Solution::Infeasible => serialize_solution(&inst, None),
    };
    let _ = io.out.write_all(text.as_bytes());
    EXIT_OK
}

fn violation_text(v: &Violation) -> String {
    match v {
        Violation::NotClosed => "NotClosed".into(),
        Violation::MissingWaypoint(w) => format!("MissingWaypoint {w}"),
        Violation::CapacityExceeded(a) => format!("CapacityExceeded {a}"),
        Violation::BudgetExceeded => "BudgetExceeded".into(),
        Violation::UnknownArc(a) => format!("UnknownArc {a}"),
    }
}

fn cmd_validate(instance: &Path, solution: &Path, io: &mut Io) -> i32 {
    let parsed = load_instance(instance).and_then(|i| Ok((parse_solution(&read_input(solution)?)?, i)));
    let (sol, inst) = match parsed {
        Ok(x) => x,
        Err(e) => return io.fail(&e),
    };
    let SolutionText::Walk { cost, vertices } = sol else {
        let _ = writeln!(io.out, "INVALID\nVIOLATION NoWalk");
        return EXIT_INVALID;
    };
    let walk = match vertices_to_walk(&inst, &vertices) {
        Ok(w) => w,
        Err(e) => {
            let _ = writeln!(io.out, "INVALID\nVIOLATION {e}");
            return EXIT_INVALID;
        }
    };
    let rep = validate_walk(&inst, &walk);
    let mut lines: Vec<String> = rep.violations.iter().map(violation_text).collect();
    if let Some(c) = cost.filter(|&c| c != rep.cost) {
        lines.push(format!("CostMismatch {c} {}", rep.cost));
    }
    if lines.is_empty() {
        let _ = writeln!(io.out, "VALID {}", rep.cost);
        EXIT_OK
    } else {
        let _ = writeln!(io.out, "INVALID");
        for l in lines {
            let _ = writeln!(io.out, "VIOLATION {l}");
        }
        EXIT_INVALID
    }
}

fn cmd_params(input: &Path, vi_limit: usize, io: &mut Io) -> i32 {
    let inst = match load_instance(input) {
        Ok(i) => i,
        Err(e) => return io.fail(&e),
    };
    let g = UnderlyingGraph::of(&inst);
    let mut out = format!("n {}\nm {}\nwaypoints {}\n", inst.n(), inst.m(), inst.waypoints().len());
    out += &format!("fes {}\n", feedback_edge_set(&g).len());
    match vertex_integrity(&g, vi_limit) {
        Some(m) => {
            let ms: Vec<String> = m.m.iter().map(|v| v.to_string()).collect();
            out += &format!("vi {} modulator {}\n", m.k, if ms.is_empty() { "-".into() } else { ms.join(",") });
        }
        None => out += &format!("vi >{vi_limit}\n"),
    }
    let (td, exact) = exact_tree_decomposition(&g);
    out += &format!("tw {} {}\n", td.width(), if exact { "exact" } else { "heuristic" });
    let _ = io.out.write_all(out.as_bytes());
    EXIT_OK
}

/// Instance text followed by one `# v <id> <label>` comment per vertex.
fn labelled(inst: &Instance, labels: &[String]) -> String {
    let mut text = serialize_instance(inst);
    for (v, l) in labels.iter().enumerate() {
        text += &format!("# v {v} {l}\n");
    }
    text
}

fn cmd_gen(cli: &Cli, g: &GenCommand, io: &mut Io) -> i32 {
    let text = match g {
        GenCommand::Random { n, density, weights, capacities, unbounded, waypoints, allow_disconnected } => {
            let range = |v: &[u64], what: &str| match v {
                [lo, hi] if 1 <= *lo && lo <= hi => Ok((*lo, *hi)),
                _ => Err(Error::Semantic(format!("--{what} takes `lo,hi` with 1 <= lo <= hi"))),
            };
            let ranges = range(weights, "weights").and_then(|w| Ok((w, range(capacities, "capacities")?)));
            let (w, c) = match ranges {
                Ok(x) => x,
                Err(e) => return io.fail(&e),
            };
            if *n < 2 || *waypoints < 2 || waypoints > n {
                return io.fail(&Error::Semantic("need n >= 2 and 2 <= waypoints <= n".into()));
            }
            let mut p = RandomParams::new(*n, cli.seed);
            p.density = *density;
            p.weights = w;
            p.capacities = c;
            p.unbounded = *unbounded;
            p.waypoints = *waypoints;
            p.backbone = !allow_disconnected;
            serialize_instance(&gen_random(&p))
        }
        GenCommand::Force { p } => {
            if *p == 0 {
                return io.fail(&Error::Semantic("--p must be at least 1".into()));
            }
            let (inst, exit) = force_gadget_host(*p);
            io.diag(format!("w -> u_out is arc {exit}"));
            let mut labels = dwrp::hardness::gen_force_gadget(*p).labels;
            labels.extend(["h0".to_string(), "h1".to_string()]);
            labelled(&inst, &labels)
        }
        GenCommand::Cover => {
            let g = gen_cover_gadget();
            match g.to_instance() {
                Ok(inst) => labelled(&inst, &g.labels),
                Err(e) => return io.fail(&e),
            }
        }
        GenCommand::CdsReduction { input, witness } => {
            let cds = match read_input(input).and_then(|t| parse_cds(&t)) {
                Ok(c) => c,
                Err(e) => return io.fail(&e),
            };
            let red = gen_cds_reduction(&cds);
            io.diag(format!(
                "{} vertices, {} arcs, {} terminals, budget {}",
                red.instance.n(),
                red.instance.m(),
                red.terminals,
                cds.budget()
            ));
            if let Some(path) = witness {
                let w = match cds_brute_force(&cds) {
                    Ok(w) => w,
                    Err(e) => return io.fail(&e),
                };
                let text = match w {
                    None => {
                        io.diag("no capacitated dominating set of size k; witness not written");
                        None
                    }
                    Some(w) => match build_witness_walk(&cds, &red, &w) {
                        Ok(walk) => Some(serialize_solution(&red.instance, Some((walk.cost(&red.instance), &walk)))),
                        Err(e) => return io.fail(&e),
                    },
                };
                if let Some(t) = text {
                    if let Err(e) = fs::write(path, t) {
                        return io.fail(&Error::Semantic(format!("{}: {e}", path.display())));
                    }
                }
            }
            labelled(&red.instance, &red.labels)
        }
        GenCommand::Corpus { out } => {
            let entries = corpus::full_corpus(cli.seed);
            if let Err(e) = corpus::write_corpus(out, &entries) {
                return io.fail(&Error::Semantic(format!("{}: {e}", out.display())));
            }
            io.diag(format!("{} instances written to {}", entries.len(), out.display()));
            return EXIT_OK;
        }
    };
    let _ = io.out.write_all(text.as_bytes());
    EXIT_OK
}

fn cmd_bench(cli: &Cli, dir: Option<&Path>, io: &mut Io) -> i32 {
    let entries = match dir {
        Some(d) => match corpus::read_corpus(d) {
            Ok(e) => e,
            Err(e) => return io.fail(&e),
        },
        None => corpus::full_corpus(cli.seed),
    };
    let _ = io.out.write_all(bench::report_header().as_bytes());
    let records = bench::run_bench(&entries, |r| {
        let _ = io.out.write_all(bench::report_line(r).as_bytes());
    });
    let _ = io.out.write_all(bench::report_summary(&records).as_bytes());
    io.diag(bench::timing_summary(&records).trim_end());
    if records.iter().all(|r| r.agrees()) {
        EXIT_OK
    } else {
        EXIT_INVALID
    }
}
