//! Closed walks, arc multisets, validation and Eulerian assembly.

use crate::error::{Error, Result};
use crate::instance::{ArcId, Instance, Vertex};

/// A closed walk given as arc ids. `start` anchors the empty walk and fixes
/// the rotation of a non-empty one (the first arc leaves `start`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosedWalk {
    pub start: Vertex,
    pub arcs: Vec<ArcId>,
}

impl ClosedWalk {
    pub fn new(start: Vertex, arcs: Vec<ArcId>) -> Self {
        ClosedWalk { start, arcs }
    }

    pub fn empty(start: Vertex) -> Self {
        ClosedWalk { start, arcs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn cost(&self, inst: &Instance) -> u64 {
        self.arcs.iter().map(|&a| inst.arc(a).weight).sum()
    }

    /// The same closed walk started at its first visit of `v`, if any.
    pub fn rotated_to(&self, inst: &Instance, v: Vertex) -> Option<ClosedWalk> {
        if self.start == v {
            return Some(self.clone());
        }
        let i = self.arcs.iter().position(|&a| inst.arc(a).head == v)? + 1;
        Some(ClosedWalk::new(v, [&self.arcs[i..], &self.arcs[..i]].concat()))
    }

    /// Vertex sequence `v0 v1 ... v0`. Assumes the walk is consecutive.
    pub fn vertices(&self, inst: &Instance) -> Vec<Vertex> {
        let mut vs = Vec::with_capacity(self.arcs.len() + 1);
        vs.push(self.start);
        for &a in &self.arcs {
            vs.push(inst.arc(a).head);
        }
        vs
    }

    /// Visits per vertex: each arc contributes a visit to its head; the empty
    /// walk visits its anchor once.
    pub fn visit_counts(&self, inst: &Instance) -> Vec<usize> {
        let mut visits = vec![0; inst.n()];
        if self.arcs.is_empty() {
            visits[self.start] = 1;
        }
        for &a in &self.arcs {
            visits[inst.arc(a).head] += 1;
        }
        visits
    }

    pub fn multiset(&self, inst: &Instance) -> ArcMultiset {
        let mut ms = ArcMultiset::zero(inst.m());
        for &a in &self.arcs {
            ms.mult[a] += 1;
        }
        ms
    }

    fn is_closed(&self, inst: &Instance) -> bool {
        let mut at = self.start;
        for &a in &self.arcs {
            let arc = inst.arc(a);
            if arc.tail != at {
                return false;
            }
            at = arc.head;
        }
        at == self.start
    }
}

/// Multiplicity per arc id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcMultiset {
    pub mult: Vec<u64>,
}

impl ArcMultiset {
    pub fn zero(m: usize) -> Self {
        ArcMultiset { mult: vec![0; m] }
    }

    pub fn is_empty(&self) -> bool {
        self.mult.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> u64 {
        self.mult.iter().sum()
    }

    pub fn cost(&self, inst: &Instance) -> u64 {
        self.mult
            .iter()
            .zip(inst.arcs())
            .map(|(&c, a)| c * a.weight)
            .sum()
    }

    /// First vertex whose in- and out-multiplicity differ.
    pub fn unbalanced_vertex(&self, inst: &Instance) -> Option<Vertex> {
        let mut net = vec![0i64; inst.n()];
        for (a, &c) in self.mult.iter().enumerate() {
            let arc = inst.arc(a);
            net[arc.tail] += c as i64;
            net[arc.head] -= c as i64;
        }
        net.iter().position(|&x| x != 0)
    }

    /// Vertices touched by an arc of positive multiplicity.
    pub fn support_vertices(&self, inst: &Instance) -> Vec<bool> {
        let mut on = vec![false; inst.n()];
        for (a, &c) in self.mult.iter().enumerate() {
            if c > 0 {
                on[inst.arc(a).tail] = true;
                on[inst.arc(a).head] = true;
            }
        }
        on
    }

    /// Weak connectivity of the support (true for the empty multiset).
    pub fn support_connected(&self, inst: &Instance) -> bool {
        let on = self.support_vertices(inst);
        let Some(root) = on.iter().position(|&b| b) else { return true };
        let mut dsu = Dsu::new(inst.n());
        for (a, &c) in self.mult.iter().enumerate() {
            if c > 0 {
                dsu.union(inst.arc(a).tail, inst.arc(a).head);
            }
        }
        let r = dsu.find(root);
        (0..inst.n()).all(|v| !on[v] || dsu.find(v) == r)
    }
}

/// Minimal union-find used for support connectivity checks.
#[derive(Debug, Clone)]
pub struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotClosed,
    MissingWaypoint(Vertex),
    CapacityExceeded(ArcId),
    BudgetExceeded,
    UnknownArc(ArcId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub cost: u64,
    pub violations: Vec<Violation>,
}

/// Checks every feasibility condition and reports all violations found.
pub fn validate_walk(inst: &Instance, walk: &ClosedWalk) -> ValidationReport {
    let mut violations = Vec::new();
    let unknown: Vec<ArcId> = walk.arcs.iter().copied().filter(|&a| a >= inst.m()).collect();
    if !unknown.is_empty() || walk.start >= inst.n() {
        let mut vs: Vec<Violation> = unknown.into_iter().map(Violation::UnknownArc).collect();
        vs.dedup();
        return ValidationReport { valid: false, cost: 0, violations: vs };
    }
    if !walk.is_closed(inst) {
        violations.push(Violation::NotClosed);
    }
    let visits = walk.visit_counts(inst);
    let mut on_walk = visits.iter().map(|&c| c > 0).collect::<Vec<_>>();
    for &a in &walk.arcs {
        on_walk[inst.arc(a).tail] = true;
    }
    for &w in inst.waypoints() {
        if !on_walk[w] {
            violations.push(Violation::MissingWaypoint(w));
        }
    }
    let ms = walk.multiset(inst);
    for (a, &c) in ms.mult.iter().enumerate() {
        if c > inst.cap_bound(a) && !inst.arc(a).capacity.is_unbounded() {
            violations.push(Violation::CapacityExceeded(a));
        }
    }
    let cost = walk.cost(inst);
    if let Some(b) = inst.budget() {
        if cost > b {
            violations.push(Violation::BudgetExceeded);
        }
    }
    ValidationReport { valid: violations.is_empty(), cost, violations }
}

/// Splits a closed walk into simple directed cycles whose arc multisets sum
/// to the walk's.
pub fn cycle_decompose(inst: &Instance, walk: &ClosedWalk) -> Result<Vec<ClosedWalk>> {
    if walk.arcs.iter().any(|&a| a >= inst.m()) || !walk.is_closed(inst) {
        return Err(Error::NotClosed);
    }
    let mut cycles = Vec::new();
    // Stack of arcs of the current simple path; pos[v] = index in the stack
    // of the arc leaving v, if v is on the path.
    let mut stack: Vec<ArcId> = Vec::new();
    let mut pos: Vec<Option<usize>> = vec![None; inst.n()];
    for &a in &walk.arcs {
        let arc = inst.arc(a);
        pos[arc.tail] = Some(stack.len());
        stack.push(a);
        if let Some(p) = pos[arc.head] {
            let cyc: Vec<ArcId> = stack.split_off(p);
            for &c in &cyc {
                pos[inst.arc(c).tail] = None;
            }
            cycles.push(ClosedWalk::new(inst.arc(cyc[0]).tail, cyc));
        }
    }
    debug_assert!(stack.is_empty());
    Ok(cycles)
}

/// Assembles a closed walk through `anchor` using each arc exactly its
/// multiplicity (Hierholzer).
pub fn multiset_to_walk(inst: &Instance, ms: &ArcMultiset, anchor: Vertex) -> Result<ClosedWalk> {
    if ms.mult.len() != inst.m() {
        return Err(Error::Internal("multiset length differs from arc count".into()));
    }
    if ms.is_empty() {
        return Ok(ClosedWalk::empty(anchor));
    }
    if let Some(v) = ms.unbalanced_vertex(inst) {
        return Err(Error::NotBalanced(v));
    }
    if !ms.support_connected(inst) {
        return Err(Error::NotConnected);
    }
    if !ms.support_vertices(inst)[anchor] {
        return Err(Error::AnchorOffSupport(anchor));
    }
    let mut remaining = ms.mult.clone();
    let mut next_out = vec![0usize; inst.n()];
    let mut circuit: Vec<ArcId> = Vec::with_capacity(ms.total() as usize);
    // Each stack frame is (vertex, arc used to reach it).
    let mut stack: Vec<(Vertex, Option<ArcId>)> = vec![(anchor, None)];
    while let Some(&(v, via)) = stack.last() {
        let outs = inst.out_arcs(v);
        while next_out[v] < outs.len() && remaining[outs[next_out[v]]] == 0 {
            next_out[v] += 1;
        }
        if next_out[v] < outs.len() {
            let a = outs[next_out[v]];
            remaining[a] -= 1;
            stack.push((inst.arc(a).head, Some(a)));
        } else {
            stack.pop();
            if let Some(a) = via {
                circuit.push(a);
            }
        }
    }
    circuit.reverse();
    Ok(ClosedWalk::new(anchor, circuit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Arc, Capacity};

    fn unit(n: usize, pairs: &[(usize, usize)], w: Vec<usize>) -> Instance {
        let arcs = pairs
            .iter()
            .map(|&(t, h)| Arc::new(t, h, 1, Capacity::Unbounded))
            .collect();
        Instance::new(n, arcs, w, None, false).unwrap()
    }

    fn walk_of(inst: &Instance, vs: &[usize]) -> ClosedWalk {
        crate::format::vertices_to_walk(inst, vs).unwrap()
    }

    #[test]
    fn validates_two_cycle() {
        let inst = unit(2, &[(0, 1), (1, 0)], vec![0, 1]);
        let r = validate_walk(&inst, &walk_of(&inst, &[0, 1, 0]));
        assert!(r.valid);
        assert_eq!(r.cost, 2);
    }

    #[test]
    fn rotation_keeps_the_arcs() {
        let inst = unit(3, &[(0, 1), (1, 0), (1, 2), (2, 0)], vec![0, 2]);
        let w = walk_of(&inst, &[1, 0, 1, 2, 0, 1]);
        let r = w.rotated_to(&inst, 2).unwrap();
        assert_eq!(r.vertices(&inst), vec![2, 0, 1, 0, 1, 2]);
        assert_eq!(r.multiset(&inst), w.multiset(&inst));
        assert_eq!(ClosedWalk::empty(1).rotated_to(&inst, 0), None);
    }

    #[test]
    fn reports_capacity_and_coverage() {
        let arcs = vec![
            Arc::new(0, 1, 1, Capacity::Finite(1)),
            Arc::new(1, 0, 1, Capacity::Unbounded),
        ];
        let inst = Instance::new(2, arcs, vec![0, 1], None, false).unwrap();
        let r = validate_walk(&inst, &walk_of(&inst, &[0, 1, 0, 1, 0]));
        assert_eq!(r.violations, vec![Violation::CapacityExceeded(0)]);

        let tri = unit(3, &[(0, 1), (1, 0), (1, 2), (2, 0)], vec![0, 1, 2]);
        let r = validate_walk(&tri, &walk_of(&tri, &[0, 1, 0]));
        assert_eq!(r.violations, vec![Violation::MissingWaypoint(2)]);
    }

    #[test]
    fn reports_all_violations_together() {
        let inst = unit(3, &[(0, 1), (1, 0), (1, 2)], vec![0, 2]).with_budget(Some(0));
        let r = validate_walk(&inst, &ClosedWalk::new(0, vec![0, 2]));
        assert_eq!(
            r.violations,
            vec![Violation::NotClosed, Violation::BudgetExceeded]
        );
        let r = validate_walk(&inst, &ClosedWalk::new(0, vec![7]));
        assert_eq!(r.violations, vec![Violation::UnknownArc(7)]);
    }

    #[test]
    fn decomposes_figure_eight() {
        let inst = unit(3, &[(0, 1), (1, 0), (1, 2), (2, 0)], vec![0, 1]);
        let w = walk_of(&inst, &[0, 1, 2, 0, 1, 0]);
        let cycles = cycle_decompose(&inst, &w).unwrap();
        let mut total = ArcMultiset::zero(inst.m());
        for c in &cycles {
            let vs = c.vertices(&inst);
            let mut inner = vs[..vs.len() - 1].to_vec();
            inner.sort_unstable();
            inner.dedup();
            assert_eq!(inner.len(), c.len(), "cycle is not simple");
            for &a in &c.arcs {
                total.mult[a] += 1;
            }
        }
        assert_eq!(total, w.multiset(&inst));
        assert!(cycle_decompose(&inst, &ClosedWalk::empty(0)).unwrap().is_empty());
        assert_eq!(
            cycle_decompose(&inst, &ClosedWalk::new(0, vec![0])),
            Err(Error::NotClosed)
        );
    }

    #[test]
    fn assembles_multisets() {
        let inst = unit(4, &[(0, 1), (1, 0), (2, 3), (3, 2)], vec![0, 1]);
        let ms = ArcMultiset { mult: vec![1, 1, 0, 0] };
        let w = multiset_to_walk(&inst, &ms, 0).unwrap();
        assert_eq!(w.vertices(&inst), vec![0, 1, 0]);
        assert_eq!(
            multiset_to_walk(&inst, &ArcMultiset { mult: vec![1, 0, 0, 0] }, 0),
            Err(Error::NotBalanced(0))
        );
        assert_eq!(
            multiset_to_walk(&inst, &ArcMultiset { mult: vec![1, 1, 1, 1] }, 0),
            Err(Error::NotConnected)
        );
        assert_eq!(
            multiset_to_walk(&inst, &ArcMultiset { mult: vec![0, 0, 1, 1] }, 0),
            Err(Error::AnchorOffSupport(0))
        );
    }
}
