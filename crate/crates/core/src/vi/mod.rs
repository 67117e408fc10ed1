//! Solver parameterized by vertex integrity.
//!
//! Given a modulator `M` whose removal leaves components of bounded size, an
//! optimal walk splits into segments between visits of `M`. Per component
//! the segments needed to cover its waypoints form one of few traversals; the
//! remaining segments only keep the walk connected and can be taken to be
//! simple paths (connectors) or single arcs inside `M`. For every guess of
//! how segments link the modulator vertices (a [`skeleton::Skeleton`]) an
//! integer program picks one traversal per component and connector counts
//! so that every modulator vertex is balanced and every guessed link is
//! realized. Walks that never leave a single component are handled
//! directly.

pub mod nfold;
pub mod segments;
pub mod skeleton;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::{Arc, ArcId, Instance, Vertex};
use crate::oracle::oracle_solve;
use crate::solution::Solution;
use crate::structparams::{Modulator, UnderlyingGraph};
use crate::walk::{multiset_to_walk, validate_walk, ArcMultiset, ClosedWalk};

pub use nfold::{solve_nfold, NFoldProgram, Sense};
pub use segments::{
    check_traversal, enumerate_connectors, enumerate_segments, enumerate_traversals, is_minimal,
    Segment, SegmentKind, Traversal,
};
pub use skeleton::{enumerate_skeletons, enumerate_skeletons_within, Skeleton};

/// Segments, connectors and traversals of one component.
#[derive(Debug, Clone)]
pub struct ComponentData {
    pub segments: Vec<Segment>,
    pub connectors: Vec<Segment>,
    pub traversals: Vec<Traversal>,
    pub has_waypoint: bool,
}

pub fn component_data(
    inst: &Instance,
    modr: &Modulator,
    comp: usize,
    max_traversals: usize,
) -> Result<ComponentData> {
    let segments = enumerate_segments(inst, modr, comp);
    let traversals = enumerate_traversals(inst, modr, comp, &segments, max_traversals)?;
    Ok(ComponentData {
        connectors: enumerate_connectors(inst, modr, comp),
        traversals,
        segments,
        has_waypoint: modr.components[comp].iter().any(|&v| inst.is_waypoint(v)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    Traversal { comp: usize, idx: usize },
    Connector { comp: usize, idx: usize },
    Trivial { arc: ArcId },
}

#[derive(Debug, Clone)]
pub struct ViProgram {
    pub program: NFoldProgram,
    pub roles: Vec<VarRole>,
}

fn segment_bad(s: &Segment, skel: &Skeleton) -> bool {
    !skel.core.contains(&s.start)
        || !skel.core.contains(&s.end)
        || (s.start != s.end && !skel.h1.contains(&(s.start, s.end)))
}

/// Integer program for one skeleton guess. Variable boxes use the visit
/// bound: no arc of an optimal walk is used more than `|W|` times.
pub fn build_nfold(
    inst: &Instance,
    modr: &Modulator,
    skel: &Skeleton,
    comps: &[ComponentData],
) -> Result<ViProgram> {
    let wcount = inst.waypoints().len() as i64;
    let mut p = NFoldProgram::default();
    let mut roles = Vec::new();
    // Endpoints of the segments each variable selects per unit.
    let mut ends: Vec<Vec<(Vertex, Vertex)>> = Vec::new();
    for (c, data) in comps.iter().enumerate() {
        let mut choice = Vec::new();
        for (idx, t) in data.traversals.iter().enumerate() {
            if t.segments.iter().any(|&s| segment_bad(&data.segments[s], skel)) {
                continue;
            }
            choice.push(p.add_var(0, 1, t.weight as i64, c));
            roles.push(VarRole::Traversal { comp: c, idx });
            ends.push(t.segments.iter().map(|&s| (data.segments[s].start, data.segments[s].end)).collect());
        }
        if choice.is_empty() {
            return Err(Error::InfeasibleGuess(format!("every traversal of component {c} is bad")));
        }
        p.add_choice(&choice, c);
        for (idx, s) in data.connectors.iter().enumerate() {
            if segment_bad(s, skel) {
                continue;
            }
            let cap = s.arcs.iter().map(|&a| inst.cap_bound(a)).min().unwrap() as i64;
            p.add_var(0, cap.min(wcount), s.weight(inst) as i64, c);
            roles.push(VarRole::Connector { comp: c, idx });
            ends.push(vec![(s.start, s.end)]);
        }
    }
    let mut brick = comps.len();
    for (a, arc) in inst.arcs().iter().enumerate() {
        if skel.h0.contains(&(arc.tail, arc.head)) {
            p.add_var(0, (inst.cap_bound(a) as i64).min(wcount), arc.weight as i64, brick);
            roles.push(VarRole::Trivial { arc: a });
            ends.push(vec![(arc.tail, arc.head)]);
            brick += 1;
        }
    }
    // Capacity rows for arcs touching a component.
    for (c, data) in comps.iter().enumerate() {
        let in_c: BTreeSet<Vertex> = modr.components[c].iter().copied().collect();
        for (a, arc) in inst.arcs().iter().enumerate() {
            if !in_c.contains(&arc.tail) && !in_c.contains(&arc.head) {
                continue;
            }
            let mut coeffs = Vec::new();
            let mut worst = 0i64;
            let mut worst_trav = 0i64;
            for (v, role) in roles.iter().enumerate() {
                let used = match *role {
                    VarRole::Traversal { comp, idx } if comp == c => {
                        let u = data.traversals[idx].usage.get(&a).copied().unwrap_or(0) as i64;
                        worst_trav = worst_trav.max(u);
                        u
                    }
                    VarRole::Connector { comp, idx } if comp == c => {
                        let u = data.connectors[idx].arcs.iter().filter(|&&x| x == a).count() as i64;
                        worst += u * p.vars[v].hi;
                        u
                    }
                    _ => 0,
                };
                if used > 0 {
                    coeffs.push((v, used));
                }
            }
            let cap = inst.cap_bound(a) as i64;
            if worst + worst_trav > cap {
                p.add_row(coeffs, Sense::Le, cap, Some(c));
            }
        }
    }
    // Realize every skeleton arc.
    for &(u, v) in &skel.h0 {
        let coeffs: Vec<(usize, i64)> = roles
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, VarRole::Trivial { arc } if (inst.arc(*arc).tail, inst.arc(*arc).head) == (u, v)))
            .map(|(i, _)| (i, 1))
            .collect();
        if coeffs.is_empty() {
            return Err(Error::InfeasibleGuess(format!("no arc {u} -> {v} inside the modulator")));
        }
        p.add_row(coeffs, Sense::Ge, 1, None);
    }
    for &(u, v) in &skel.h1 {
        let coeffs: Vec<(usize, i64)> = roles
            .iter()
            .enumerate()
            .filter(|(_, r)| !matches!(r, VarRole::Trivial { .. }))
            .filter_map(|(i, _)| {
                let k = ends[i].iter().filter(|&&e| e == (u, v)).count() as i64;
                (k > 0).then_some((i, k))
            })
            .collect();
        if coeffs.is_empty() {
            return Err(Error::InfeasibleGuess(format!("no segment {u} -> {v} through a component")));
        }
        p.add_row(coeffs, Sense::Ge, 1, None);
    }
    for &m in &skel.core {
        let coeffs: Vec<(usize, i64)> = ends
            .iter()
            .enumerate()
            .filter_map(|(i, es)| {
                let net: i64 = es.iter().map(|&(s, e)| (s == m) as i64 - (e == m) as i64).sum();
                (net != 0).then_some((i, net))
            })
            .collect();
        if !coeffs.is_empty() {
            p.add_row(coeffs, Sense::Eq, 0, None);
        }
    }
    Ok(ViProgram { program: p, roles })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ViConfig {
    pub max_traversals: usize,
    pub max_nodes: u64,
}

impl Default for ViConfig {
    fn default() -> Self {
        ViConfig { max_traversals: segments::DEFAULT_MAX_TRAVERSALS, max_nodes: nfold::DEFAULT_MAX_NODES }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViStats {
    pub skeletons: usize,
    pub programs: usize,
    pub traversals: usize,
    pub max_traversal_occurrences: usize,
    pub max_traversal_arc_use: u64,
}

pub fn solve_vi(inst: &Instance, modr: &Modulator) -> Result<Solution> {
    solve_vi_with(inst, modr, ViConfig::default()).map(|x| x.0)
}

/// Rejects a modulator that does not match the instance.
fn check_modulator(inst: &Instance, modr: &Modulator) -> Result<()> {
    let fresh = Modulator::from_set(&UnderlyingGraph::of(inst), modr.m.clone(), modr.k);
    if fresh != *modr || !modr.is_valid() {
        return Err(Error::Semantic(format!("{:?} is not a valid {}-modulator", modr.m, modr.k)));
    }
    Ok(())
}

/// Optimum of the walks staying inside the one component holding every
/// waypoint, if there is such a component.
fn inside_component(inst: &Instance, modr: &Modulator) -> Result<Option<(u64, ClosedWalk)>> {
    let Some(comp) = modr
        .components
        .iter()
        .find(|c| inst.waypoints().iter().all(|w| c.binary_search(w).is_ok()))
    else {
        return Ok(None);
    };
    let local = |v: Vertex| comp.binary_search(&v).ok();
    let mut ids = Vec::new();
    let mut arcs = Vec::new();
    for (a, arc) in inst.arcs().iter().enumerate() {
        if let (Some(t), Some(h)) = (local(arc.tail), local(arc.head)) {
            arcs.push(Arc::new(t, h, arc.weight, arc.capacity));
            ids.push(a);
        }
    }
    let ws = inst.waypoints().iter().map(|&w| local(w).unwrap()).collect();
    // Arcs are already sorted by (tail, head) in both numberings.
    let sub = Instance::relaxed(comp.len(), arcs, ws, None, inst.multiarc())?;
    Ok(oracle_solve(&sub)?.walk().map(|w| {
        let walk = ClosedWalk::new(comp[w.start], w.arcs.iter().map(|&a| ids[a]).collect());
        (walk.cost(inst), walk)
    }))
}

pub fn solve_vi_with(inst: &Instance, modr: &Modulator, cfg: ViConfig) -> Result<(Solution, ViStats)> {
    check_modulator(inst, modr)?;
    let mut stats = ViStats::default();
    let comps: Vec<ComponentData> = (0..modr.components.len())
        .map(|c| component_data(inst, modr, c, cfg.max_traversals))
        .collect::<Result<_>>()?;
    for t in comps.iter().flat_map(|d| &d.traversals) {
        stats.traversals += 1;
        stats.max_traversal_occurrences = stats.max_traversal_occurrences.max(t.occurrences);
        stats.max_traversal_arc_use = stats.max_traversal_arc_use.max(t.max_arc_use());
    }
    let inside = inside_component(inst, modr)?;
    let w_in_m: Vec<Vertex> = modr.m.iter().copied().filter(|&v| inst.is_waypoint(v)).collect();
    let in_m = |v: Vertex| modr.m.binary_search(&v).is_ok();
    let allowed0: Vec<(Vertex, Vertex)> = inst
        .arcs()
        .iter()
        .filter(|a| in_m(a.tail) && in_m(a.head))
        .map(|a| (a.tail, a.head))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let allowed1: Vec<(Vertex, Vertex)> = comps
        .iter()
        .flat_map(|d| {
            let used: BTreeSet<usize> = d.traversals.iter().flat_map(|t| t.segments.iter().copied()).collect();
            let from_t: Vec<&Segment> = used.into_iter().map(|i| &d.segments[i]).collect();
            from_t.into_iter().chain(d.connectors.iter()).map(|s| (s.start, s.end))
        })
        .filter(|&(u, v)| u != v)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut chosen: Option<(i64, ViProgram, Vec<i64>)> = None;
    let mut guesses = Vec::new();
    if !modr.m.is_empty() {
        for skel in enumerate_skeletons_within(&w_in_m, &allowed0, &allowed1) {
            if skel.core.is_empty() {
                for &m in &modr.m {
                    guesses.push(Skeleton { core: vec![m], ..skel.clone() });
                }
            } else {
                guesses.push(skel);
            }
        }
    }
    stats.skeletons = guesses.len();
    for skel in &guesses {
        let prog = match build_nfold(inst, modr, skel, &comps) {
            Ok(p) => p,
            Err(Error::InfeasibleGuess(_)) => continue,
            Err(e) => return Err(e),
        };
        stats.programs += 1;
        let cutoff = match (&chosen, &inside) {
            (Some(c), _) => Some(c.0),
            (None, Some(i)) => Some(i.0 as i64),
            (None, None) => None,
        };
        if let Some((cost, x)) = solve_nfold(&prog.program, cutoff, cfg.max_nodes)? {
            chosen = Some((cost, prog, x));
        }
    }
    let best = match chosen {
        Some((_, prog, x)) => {
            let walk = assemble(inst, &comps, &prog, &x)?;
            Some((walk.cost(inst), walk))
        }
        None => inside,
    };
    if let Some((cost, walk)) = &best {
        let report = validate_walk(&inst.with_budget(None), walk);
        if !report.valid || report.cost != *cost {
            return Err(Error::Internal(format!("assembled walk is invalid: {:?}", report.violations)));
        }
    }
    Ok((Solution::from_optimum(inst, best), stats))
}

fn assemble(inst: &Instance, comps: &[ComponentData], prog: &ViProgram, x: &[i64]) -> Result<ClosedWalk> {
    let mut ms = ArcMultiset::zero(inst.m());
    for (role, &val) in prog.roles.iter().zip(x) {
        let arcs: Vec<ArcId> = match *role {
            VarRole::Traversal { comp, idx } => comps[comp].traversals[idx]
                .segments
                .iter()
                .flat_map(|&s| comps[comp].segments[s].arcs.iter().copied())
                .collect(),
            VarRole::Connector { comp, idx } => comps[comp].connectors[idx].arcs.clone(),
            VarRole::Trivial { arc } => vec![arc],
        };
        for a in arcs {
            ms.mult[a] += val as u64;
        }
    }
    multiset_to_walk(inst, &ms, inst.waypoints()[0])
}
