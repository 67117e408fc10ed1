//! Solver dispatch and the `auto` selector.

use dwrp::colorcoding::{solve_k_occurrences, ColorCodingConfig, FamilyMode};
use dwrp::fes::solve_fes;
use dwrp::oracle::{enumeration_space, oracle_solve};
use dwrp::structparams::{exact_tree_decomposition, feedback_edge_set, vertex_integrity, Modulator, UnderlyingGraph};
use dwrp::twdp::solve_twdp;
use dwrp::vi::solve_vi;
use dwrp::{Error, Instance, Result, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Algo {
    Oracle,
    Colorcoding,
    Fes,
    Vi,
    Twdp,
    Auto,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Oracle => "oracle",
            Algo::Colorcoding => "colorcoding",
            Algo::Fes => "fes",
            Algo::Vi => "vi",
            Algo::Twdp => "twdp",
            Algo::Auto => "auto",
        }
    }
}

/// Largest vertex integrity searched for when no modulator is given.
pub const VI_LIMIT: usize = 4;
/// `auto` never picks vi above this vertex integrity.
pub const AUTO_VI_MAX: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoOptions {
    pub k: Option<usize>,
    pub family: FamilyMode,
    pub modulator: Option<Vec<usize>>,
    pub nu: Option<usize>,
}

impl Default for AlgoOptions {
    fn default() -> Self {
        AlgoOptions { k: None, family: FamilyMode::Block, modulator: None, nu: None }
    }
}

/// Modulator for a given deletion set: `k` is the larger of `|M|` and the
/// biggest remaining component.
pub fn modulator_for(inst: &Instance, m: &[usize]) -> Result<Modulator> {
    if let Some(&v) = m.iter().find(|&&v| v >= inst.n()) {
        return Err(Error::Semantic(format!("modulator vertex {v} out of range")));
    }
    let g = UnderlyingGraph::of(inst);
    let probe = Modulator::from_set(&g, m.to_vec(), usize::MAX);
    let k = probe.components.iter().map(Vec::len).max().unwrap_or(0).max(probe.m.len()).max(1);
    Ok(Modulator::from_set(&g, m.to_vec(), k))
}

pub fn smallest_modulator(inst: &Instance, limit: usize) -> Result<Modulator> {
    vertex_integrity(&UnderlyingGraph::of(inst), limit)
        .ok_or_else(|| Error::TooLarge(format!("vertex integrity above {limit}")))
}

pub fn solve_with(inst: &Instance, algo: Algo, opts: &AlgoOptions) -> Result<Solution> {
    match algo {
        Algo::Oracle => oracle_solve(inst),
        Algo::Colorcoding => {
            let k = opts.k.ok_or_else(|| Error::Semantic("colorcoding needs --k".into()))?;
            solve_k_occurrences(inst, ColorCodingConfig::new(k, opts.family))
        }
        Algo::Fes => solve_fes(inst),
        Algo::Vi => {
            let modr = match &opts.modulator {
                Some(m) => modulator_for(inst, m)?,
                None => smallest_modulator(inst, VI_LIMIT)?,
            };
            solve_vi(inst, &modr)
        }
        Algo::Twdp => solve_twdp(inst, opts.nu),
        Algo::Auto => {
            let choice = choose_auto(inst);
            solve_with(inst, choice.algo, opts)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoChoice {
    pub algo: Algo,
    /// Predicted state-space size per candidate, in log10.
    pub estimates: Vec<(Algo, f64)>,
}

fn bell(k: usize) -> f64 {
    // Bell numbers by the triangle
    let mut row = vec![1f64];
    for _ in 0..k {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            next.push(next.last().unwrap() + x);
        }
        row = next;
    }
    row[0]
}

/// Log10 state-space predictions:
/// oracle: the multiplicity space `Π (min(cap, |W|) + 1)`;
/// fes: `7^k` type assignments times `(14k)^2`;
/// vi: `(k+1)^(k^2)` skeleton-and-traversal guesses, only for `k <= 3`;
/// twdp: `Bell(tw+1) (|W|+1)^(2(tw+1))` keys per bag times `n`.
pub fn choose_auto(inst: &Instance) -> AutoChoice {
    let g = UnderlyingGraph::of(inst);
    let w = inst.waypoints().len() as f64;
    let mut est = vec![(Algo::Oracle, enumeration_space(inst).log10())];
    if !inst.has_parallel_arcs() {
        let k = feedback_edge_set(&g).len() as f64;
        est.push((Algo::Fes, k * 7f64.log10() + 2.0 * (14.0 * k).max(1.0).log10()));
    }
    if let Some(m) = vertex_integrity(&g, AUTO_VI_MAX) {
        let k = m.k as f64;
        est.push((Algo::Vi, k * k * (k + 1.0).log10()));
    }
    let (td, _) = exact_tree_decomposition(&g);
    let b = td.width() + 1;
    est.push((Algo::Twdp, bell(b).log10() + 2.0 * b as f64 * (w + 1.0).log10() + (inst.n() as f64).log10()));
    let algo = est.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
    AutoChoice { algo, estimates: est }
}
