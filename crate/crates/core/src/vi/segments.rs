//! Segments and traversals of one component of `G - M`.
//!
//! A segment is a walk whose endpoints lie in `M` and whose internal vertices
//! lie outside it. Walks are stored as arc sequences so parallel arcs stay
//! distinguishable.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{ArcId, Instance, Vertex};
use crate::structparams::Modulator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SegmentKind {
    /// A single arc inside `M`.
    Trivial,
    /// Internal vertices in the given component.
    NonTrivial(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub start: Vertex,
    pub end: Vertex,
    pub arcs: Vec<ArcId>,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn vertices(&self, inst: &Instance) -> Vec<Vertex> {
        let mut vs = vec![self.start];
        vs.extend(self.arcs.iter().map(|&a| inst.arc(a).head));
        vs
    }

    pub fn occurrences(&self) -> usize {
        self.arcs.len() + 1
    }

    pub fn weight(&self, inst: &Instance) -> u64 {
        self.arcs.iter().map(|&a| inst.arc(a).weight).sum()
    }

    pub fn usage(&self) -> BTreeMap<ArcId, u64> {
        let mut u = BTreeMap::new();
        for &a in &self.arcs {
            *u.entry(a).or_insert(0) += 1;
        }
        u
    }
}

/// Per-component context: membership in `M`, in the component, and the
/// component's waypoints as bit positions.
pub(crate) struct CompView {
    pub in_m: Vec<bool>,
    pub in_c: Vec<bool>,
    pub w_bit: Vec<Option<u32>>,
    pub w_count: usize,
    pub size: usize,
}

impl CompView {
    pub fn new(inst: &Instance, modr: &Modulator, comp: usize) -> Self {
        let n = inst.n();
        let mut in_m = vec![false; n];
        for &v in &modr.m {
            in_m[v] = true;
        }
        let mut in_c = vec![false; n];
        let mut w_bit = vec![None; n];
        let mut w_count = 0;
        for &v in &modr.components[comp] {
            in_c[v] = true;
            if inst.is_waypoint(v) {
                w_bit[v] = Some(w_count as u32);
                w_count += 1;
            }
        }
        CompView { in_m, in_c, w_bit, w_count, size: modr.components[comp].len() }
    }

    fn bit(&self, v: Vertex) -> u64 {
        self.w_bit[v].map_or(0, |b| 1 << b)
    }

    pub fn covered(&self, inst: &Instance, arcs: &[ArcId]) -> u64 {
        arcs.iter().fold(0, |m, &a| m | self.bit(inst.arc(a).head))
    }

    /// Longest segment worth enumerating. Between two consecutive first
    /// visits of waypoints the revisit cut allows no repeated vertex, so the
    /// part inside `C` is at most `|W ∩ C| + 1` runs of at most `|C|`
    /// vertices, plus the two endpoints in `M`.
    pub fn occurrence_cap(&self) -> usize {
        (self.w_count + 1) * self.size + 2
    }
}

/// Depth-first walk enumeration from `start` into the component. A walk
/// that comes back to a vertex without having covered a new waypoint since
/// its previous visit there is cut: removing the closed part in between
/// gives a shorter walk over a subset of its arcs covering the same
/// waypoints, so neither it nor any extension is minimal.
struct WalkSearch<'a> {
    inst: &'a Instance,
    view: &'a CompView,
    /// Multiplicity limit per arc; `None` means any arc of the instance up
    /// to its capacity.
    allowed: Option<&'a BTreeMap<ArcId, u64>>,
    cap: usize,
    used: BTreeMap<ArcId, u64>,
    last_mask: Vec<Vec<u64>>,
    arcs: Vec<ArcId>,
}

impl<'a> WalkSearch<'a> {
    fn new(
        inst: &'a Instance,
        view: &'a CompView,
        allowed: Option<&'a BTreeMap<ArcId, u64>>,
        cap: usize,
    ) -> Self {
        WalkSearch {
            inst,
            view,
            allowed,
            cap,
            used: BTreeMap::new(),
            last_mask: vec![Vec::new(); inst.n()],
            arcs: Vec::new(),
        }
    }

    fn limit(&self, a: ArcId) -> u64 {
        match self.allowed {
            Some(m) => m.get(&a).copied().unwrap_or(0),
            None => self.inst.cap_bound(a),
        }
    }

    fn arc_options(&self, v: Vertex) -> Vec<ArcId> {
        self.inst
            .out_arcs(v)
            .iter()
            .copied()
            .filter(|&a| {
                let h = self.inst.arc(a).head;
                (self.view.in_c[h] || self.view.in_m[h])
                    && self.used.get(&a).copied().unwrap_or(0) < self.limit(a)
            })
            .collect()
    }

    /// Calls `emit` for every finished walk; `emit` returns false to stop.
    fn run(&mut self, start: Vertex, emit: &mut dyn FnMut(&[ArcId], Vertex, u64) -> bool) -> bool {
        for a in self.arc_options(start) {
            let h = self.inst.arc(a).head;
            if !self.view.in_c[h] {
                continue;
            }
            if !self.step(a, 0, emit) {
                return false;
            }
        }
        true
    }

    fn step(&mut self, a: ArcId, mask: u64, emit: &mut dyn FnMut(&[ArcId], Vertex, u64) -> bool) -> bool {
        let h = self.inst.arc(a).head;
        let mask = mask | self.view.bit(h);
        self.arcs.push(a);
        *self.used.entry(a).or_insert(0) += 1;
        let mut go_on = true;
        if self.view.in_m[h] {
            go_on = emit(&self.arcs, h, mask);
        } else if !self.last_mask[h].contains(&mask) && self.arcs.len() + 1 < self.cap {
            // arcs.len() + 1 vertex occurrences so far; room for one more.
            self.last_mask[h].push(mask);
            for b in self.arc_options(h) {
                if !self.step(b, mask, emit) {
                    go_on = false;
                    break;
                }
            }
            self.last_mask[h].pop();
        }
        *self.used.get_mut(&a).unwrap() -= 1;
        self.arcs.pop();
        go_on
    }
}

/// Whether no strictly lighter segment with the same endpoints uses a
/// sub-multiset of the arcs of `s` and covers every waypoint of `s`.
pub fn is_minimal(inst: &Instance, modr: &Modulator, comp: usize, s: &Segment) -> bool {
    let view = CompView::new(inst, modr, comp);
    let need = view.covered(inst, &s.arcs);
    let weight = s.weight(inst);
    let usage = s.usage();
    let mut search = WalkSearch::new(inst, &view, Some(&usage), usize::MAX);
    let mut found = false;
    search.run(s.start, &mut |arcs, end, mask| {
        if end == s.end && mask == need && arcs.iter().map(|&a| inst.arc(a).weight).sum::<u64>() < weight {
            found = true;
            return false;
        }
        true
    });
    !found
}

/// Minimal non-trivial segments through component `comp`, up to the
/// occurrence cap, in deterministic order.
pub fn enumerate_segments(inst: &Instance, modr: &Modulator, comp: usize) -> Vec<Segment> {
    let view = CompView::new(inst, modr, comp);
    let mut out = Vec::new();
    for &u in &modr.m {
        let mut found = Vec::new();
        let mut search = WalkSearch::new(inst, &view, None, view.occurrence_cap());
        search.run(u, &mut |arcs, end, _| {
            found.push(Segment { start: u, end, arcs: arcs.to_vec(), kind: SegmentKind::NonTrivial(comp) });
            true
        });
        out.extend(found.into_iter().filter(|s| is_minimal(inst, modr, comp, s)));
    }
    out.sort();
    out
}

/// Simple paths `u -> ... -> v` with `u != v` in `M` and all internal
/// vertices in the component.
pub fn enumerate_connectors(inst: &Instance, modr: &Modulator, comp: usize) -> Vec<Segment> {
    let view = CompView::new(inst, modr, comp);
    let mut out = Vec::new();
    fn extend(
        inst: &Instance,
        view: &CompView,
        comp: usize,
        start: Vertex,
        v: Vertex,
        seen: &mut Vec<bool>,
        arcs: &mut Vec<ArcId>,
        out: &mut Vec<Segment>,
    ) {
        for &a in inst.out_arcs(v) {
            let h = inst.arc(a).head;
            arcs.push(a);
            if view.in_m[h] {
                if h != start {
                    out.push(Segment { start, end: h, arcs: arcs.clone(), kind: SegmentKind::NonTrivial(comp) });
                }
            } else if view.in_c[h] && !seen[h] {
                seen[h] = true;
                extend(inst, view, comp, start, h, seen, arcs, out);
                seen[h] = false;
            }
            arcs.pop();
        }
    }
    for &u in &modr.m {
        let mut seen = vec![false; inst.n()];
        for &a in inst.out_arcs(u) {
            let h = inst.arc(a).head;
            if view.in_c[h] {
                seen[h] = true;
                let mut arcs = vec![a];
                extend(inst, &view, comp, u, h, &mut seen, &mut arcs, &mut out);
                seen[h] = false;
            }
        }
    }
    out.sort();
    out
}

/// A set of segments of one component chosen to cover its waypoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Traversal {
    pub comp: usize,
    /// Indices into the component's segment list, ascending.
    pub segments: Vec<usize>,
    pub occurrences: usize,
    pub usage: BTreeMap<ArcId, u64>,
    pub weight: u64,
}

impl Traversal {
    fn of(inst: &Instance, comp: usize, segs: &[Segment], idx: Vec<usize>) -> Self {
        let mut usage = BTreeMap::new();
        let mut occurrences = 0;
        let mut weight = 0;
        for &i in &idx {
            occurrences += segs[i].occurrences();
            weight += segs[i].weight(inst);
            for (a, c) in segs[i].usage() {
                *usage.entry(a).or_insert(0) += c;
            }
        }
        Traversal { comp, segments: idx, occurrences, usage, weight }
    }

    pub fn max_arc_use(&self) -> u64 {
        self.usage.values().copied().max().unwrap_or(0)
    }
}

pub const DEFAULT_MAX_TRAVERSALS: usize = 200_000;

/// Irredundant covering sets of segments within capacities. A set where
/// some segment has no private waypoint stays redundant when grown, so the
/// search cuts there. Segments never repeat: a second copy would have no
/// private waypoint.
pub fn enumerate_traversals(
    inst: &Instance,
    modr: &Modulator,
    comp: usize,
    segs: &[Segment],
    max_traversals: usize,
) -> Result<Vec<Traversal>> {
    let view = CompView::new(inst, modr, comp);
    if view.w_count == 0 {
        return Ok(vec![Traversal::of(inst, comp, segs, Vec::new())]);
    }
    let full = (1u64 << view.w_count) - 1;
    let masks: Vec<u64> = segs.iter().map(|s| view.covered(inst, &s.arcs)).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut usage: BTreeMap<ArcId, u64> = BTreeMap::new();
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        inst: &Instance,
        segs: &[Segment],
        masks: &[u64],
        full: u64,
        from: usize,
        limit: usize,
        chosen: &mut Vec<usize>,
        usage: &mut BTreeMap<ArcId, u64>,
        out: &mut Vec<Vec<usize>>,
        max: usize,
    ) -> Result<()> {
        let union = chosen.iter().fold(0, |m, &i| m | masks[i]);
        if union == full {
            out.push(chosen.clone());
            if out.len() > max {
                return Err(Error::TooMany(format!("more than {max} traversals of one component")));
            }
            return Ok(());
        }
        if chosen.len() == limit {
            return Ok(());
        }
        for i in from..segs.len() {
            if masks[i] & !union == 0 {
                continue;
            }
            chosen.push(i);
            let irredundant = chosen.iter().enumerate().all(|(j, &s)| {
                let others = chosen
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != j)
                    .fold(0, |m, (_, &t)| m | masks[t]);
                masks[s] & !others != 0
            });
            let mut fits = true;
            for &a in &segs[i].arcs {
                let e = usage.entry(a).or_insert(0);
                *e += 1;
                fits &= *e <= inst.cap_bound(a);
            }
            if irredundant && fits {
                dfs(inst, segs, masks, full, i + 1, limit, chosen, usage, out, max)?;
            }
            for &a in &segs[i].arcs {
                *usage.get_mut(&a).unwrap() -= 1;
            }
            chosen.pop();
        }
        Ok(())
    }
    let mut sets = Vec::new();
    dfs(inst, segs, &masks, full, 0, view.w_count, &mut chosen, &mut usage, &mut sets, max_traversals)?;
    out.extend(sets.into_iter().map(|idx| Traversal::of(inst, comp, segs, idx)));
    Ok(out)
}

/// Checks the four defining conditions of a traversal directly.
pub fn check_traversal(
    inst: &Instance,
    modr: &Modulator,
    comp: usize,
    segs: &[Segment],
    t: &Traversal,
) -> bool {
    let comp_w: Vec<Vertex> =
        modr.components[comp].iter().copied().filter(|&v| inst.is_waypoint(v)).collect();
    let covers = |idx: &[usize], w: Vertex| idx.iter().any(|&i| segs[i].vertices(inst).contains(&w));
    let all_covered = comp_w.iter().all(|&w| covers(&t.segments, w));
    let irredundant = (0..t.segments.len()).all(|j| {
        let rest: Vec<usize> =
            t.segments.iter().enumerate().filter(|&(l, _)| l != j).map(|(_, &s)| s).collect();
        comp_w.iter().any(|&w| !covers(&rest, w))
    });
    let minimal = t.segments.iter().all(|&i| is_minimal(inst, modr, comp, &segs[i]));
    let mut usage: BTreeMap<ArcId, u64> = BTreeMap::new();
    for &i in &t.segments {
        for &a in &segs[i].arcs {
            *usage.entry(a).or_insert(0) += 1;
        }
    }
    let within = usage.iter().all(|(&a, &c)| c <= inst.cap_bound(a));
    all_covered && irredundant && minimal && within
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Arc, Capacity};
    use crate::structparams::UnderlyingGraph;

    fn modulator(inst: &Instance, m: Vec<Vertex>, k: usize) -> Modulator {
        Modulator::from_set(&UnderlyingGraph::of(inst), m, k)
    }

    #[test]
    fn single_vertex_component() {
        // u=0, v=1 in M; a=2 with u->a, a->v, a->u.
        let arcs = vec![
            Arc::new(0, 2, 1, Capacity::Unbounded),
            Arc::new(2, 1, 1, Capacity::Unbounded),
            Arc::new(2, 0, 1, Capacity::Unbounded),
            Arc::new(1, 0, 1, Capacity::Unbounded),
        ];
        let inst = Instance::new(3, arcs, vec![0, 2], None, false).unwrap();
        let modr = modulator(&inst, vec![0, 1], 2);
        let comp = modr.components.iter().position(|c| c == &vec![2]).unwrap();
        let segs = enumerate_segments(&inst, &modr, comp);
        let ends: Vec<(Vertex, Vertex)> = segs.iter().map(|s| (s.start, s.end)).collect();
        assert_eq!(ends, vec![(0, 0), (0, 1)]);
        let ts = enumerate_traversals(&inst, &modr, comp, &segs, 100).unwrap();
        assert_eq!(ts.len(), 2);
        assert!(ts.iter().all(|t| t.segments.len() == 1 && check_traversal(&inst, &modr, comp, &segs, t)));
    }

    #[test]
    fn needed_back_and_forth() {
        // u=0 -> a=1 <-> b=2, a -> u; both a, b waypoints.
        let arcs = vec![
            Arc::new(0, 1, 1, Capacity::Unbounded),
            Arc::new(1, 2, 1, Capacity::Unbounded),
            Arc::new(2, 1, 1, Capacity::Unbounded),
            Arc::new(1, 0, 1, Capacity::Unbounded),
        ];
        let inst = Instance::new(3, arcs, vec![1, 2], None, false).unwrap();
        let modr = modulator(&inst, vec![0], 2);
        let segs = enumerate_segments(&inst, &modr, 0);
        assert!(segs.iter().any(|s| s.vertices(&inst) == vec![0, 1, 2, 1, 0]));
        // u,a,u covers only a; it is minimal but no traversal pairs it with
        // the longer segment (that one covers a too).
        let ts = enumerate_traversals(&inst, &modr, 0, &segs, 100).unwrap();
        assert_eq!(ts.len(), 1);
    }

    #[test]
    fn empty_traversal_without_waypoints() {
        let arcs = vec![Arc::new(0, 1, 1, Capacity::Unbounded), Arc::new(1, 0, 1, Capacity::Unbounded)];
        let inst = Instance::relaxed(2, arcs, vec![0], None, false).unwrap();
        let modr = modulator(&inst, vec![0], 1);
        let segs = enumerate_segments(&inst, &modr, 0);
        let ts = enumerate_traversals(&inst, &modr, 0, &segs, 100).unwrap();
        assert_eq!(ts.len(), 1);
        assert!(ts[0].segments.is_empty());
    }

    #[test]
    fn connectors_are_simple_paths() {
        let arcs = vec![
            Arc::new(0, 2, 1, Capacity::Unbounded),
            Arc::new(2, 3, 1, Capacity::Unbounded),
            Arc::new(3, 2, 1, Capacity::Unbounded),
            Arc::new(3, 1, 1, Capacity::Unbounded),
            Arc::new(2, 1, 1, Capacity::Unbounded),
        ];
        let inst = Instance::relaxed(4, arcs, vec![0], None, false).unwrap();
        let modr = modulator(&inst, vec![0, 1], 2);
        let c = enumerate_connectors(&inst, &modr, 0);
        let paths: Vec<Vec<Vertex>> = c.iter().map(|s| s.vertices(&inst)).collect();
        assert_eq!(paths.len(), 2);
        assert!(paths.contains(&vec![0, 2, 1]));
        assert!(paths.contains(&vec![0, 2, 3, 1]));
    }
}
