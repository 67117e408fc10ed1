//! The routing instance: a directed multigraph with weighted, capacitated
//! arcs, a waypoint set and an optional budget.

use std::fmt;

use crate::error::{Error, Result};

/// Vertex identifier. Vertices of an instance are `0..n`.
pub type Vertex = usize;

/// Index into [`Instance::arcs`].
pub type ArcId = usize;

/// Arc capacity. `Unbounded` is kept symbolic so instance files do not depend
/// on the vertex count; solvers that need a finite number use
/// [`Instance::cap_bound`], which materializes it as `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Capacity {
    Finite(u64),
    Unbounded,
}

impl Capacity {
    pub fn is_unbounded(self) -> bool {
        matches!(self, Capacity::Unbounded)
    }

    /// Finite value, or `unbounded` when the capacity is symbolic.
    pub fn or(self, unbounded: u64) -> u64 {
        match self {
            Capacity::Finite(c) => c,
            Capacity::Unbounded => unbounded,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: Vertex,
    pub head: Vertex,
    pub weight: u64,
    pub capacity: Capacity,
}

impl Arc {
    pub fn new(tail: Vertex, head: Vertex, weight: u64, capacity: Capacity) -> Self {
        Arc { tail, head, weight, capacity }
    }
}

/// An immutable instance. Arcs are stored in canonical order (by tail, then
/// head, then insertion order), so arc ids are stable across a
/// serialize/parse round trip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    arcs: Vec<Arc>,
    waypoints: Vec<Vertex>,
    budget: Option<u64>,
    multiarc: bool,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
}

impl Instance {
    /// Builds a validated instance: weights at least 1, capacities at least 1,
    /// at least two waypoints, no self-loops, and no parallel arcs unless
    /// `multiarc` is set.
    pub fn new(
        n: usize,
        arcs: Vec<Arc>,
        waypoints: Vec<Vertex>,
        budget: Option<u64>,
        multiarc: bool,
    ) -> Result<Self> {
        let inst = Self::assemble(n, arcs, waypoints, budget, multiarc)?;
        if inst.waypoints.len() < 2 {
            return Err(Error::Semantic("at least two waypoints are required".into()));
        }
        if let Some(a) = inst.arcs.iter().find(|a| a.weight == 0) {
            return Err(Error::Semantic(format!(
                "arc {} -> {} has weight 0",
                a.tail, a.head
            )));
        }
        Ok(inst)
    }

    /// Builds an instance for derived sub-problems: zero weights and a single
    /// waypoint are allowed. Everything else is validated as in [`Instance::new`].
    pub fn relaxed(
        n: usize,
        arcs: Vec<Arc>,
        waypoints: Vec<Vertex>,
        budget: Option<u64>,
        multiarc: bool,
    ) -> Result<Self> {
        let inst = Self::assemble(n, arcs, waypoints, budget, multiarc)?;
        if inst.waypoints.is_empty() {
            return Err(Error::Semantic("at least one waypoint is required".into()));
        }
        Ok(inst)
    }

    fn assemble(
        n: usize,
        mut arcs: Vec<Arc>,
        mut waypoints: Vec<Vertex>,
        budget: Option<u64>,
        multiarc: bool,
    ) -> Result<Self> {
        for a in &arcs {
            if a.tail >= n || a.head >= n {
                return Err(Error::Semantic(format!(
                    "arc {} -> {} has a vertex out of range (n = {n})",
                    a.tail, a.head
                )));
            }
            if a.tail == a.head {
                return Err(Error::Semantic(format!("self-loop at vertex {}", a.tail)));
            }
            if a.capacity == Capacity::Finite(0) {
                return Err(Error::Semantic(format!(
                    "arc {} -> {} has capacity 0",
                    a.tail, a.head
                )));
            }
        }
        if let Some(&w) = waypoints.iter().find(|&&w| w >= n) {
            return Err(Error::Semantic(format!("waypoint {w} out of range (n = {n})")));
        }
        arcs.sort_by_key(|a| (a.tail, a.head));
        if !multiarc {
            if let Some(pair) = arcs
                .windows(2)
                .find(|p| p[0].tail == p[1].tail && p[0].head == p[1].head)
            {
                return Err(Error::Semantic(format!(
                    "duplicate arc {} -> {} (enable multiarc to allow parallel arcs)",
                    pair[0].tail, pair[0].head
                )));
            }
        }
        waypoints.sort_unstable();
        waypoints.dedup();
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        for (id, a) in arcs.iter().enumerate() {
            out_arcs[a.tail].push(id);
            in_arcs[a.head].push(id);
        }
        Ok(Instance { n, arcs, waypoints, budget, multiarc, out_arcs, in_arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id]
    }

    /// Sorted, deduplicated waypoint set.
    pub fn waypoints(&self) -> &[Vertex] {
        &self.waypoints
    }

    pub fn is_waypoint(&self, v: Vertex) -> bool {
        self.waypoints.binary_search(&v).is_ok()
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn multiarc(&self) -> bool {
        self.multiarc
    }

    pub fn out_arcs(&self, v: Vertex) -> &[ArcId] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: Vertex) -> &[ArcId] {
        &self.in_arcs[v]
    }

    /// Capacity of an arc with `Unbounded` materialized as `n`.
    pub fn cap_bound(&self, id: ArcId) -> u64 {
        self.arcs[id].capacity.or(self.n as u64)
    }

    /// First arc `tail -> head`, if any.
    pub fn find_arc(&self, tail: Vertex, head: Vertex) -> Option<ArcId> {
        self.out_arcs[tail].iter().copied().find(|&a| self.arcs[a].head == head)
    }

    /// True if some ordered vertex pair carries more than one arc.
    pub fn has_parallel_arcs(&self) -> bool {
        self.arcs
            .windows(2)
            .any(|p| p[0].tail == p[1].tail && p[0].head == p[1].head)
    }

    /// Largest arc weight, 0 for an arcless instance.
    pub fn max_weight(&self) -> u64 {
        self.arcs.iter().map(|a| a.weight).max().unwrap_or(0)
    }

    /// Same instance with a different budget.
    pub fn with_budget(&self, budget: Option<u64>) -> Instance {
        Instance { budget, ..self.clone() }
    }

    /// Same instance with a different waypoint set (validated like `relaxed`).
    pub fn with_waypoints(&self, waypoints: Vec<Vertex>) -> Result<Instance> {
        Self::relaxed(self.n, self.arcs.clone(), waypoints, self.budget, self.multiarc)
    }

    /// Vertices reachable from `start` along arcs.
    pub fn reachable_from(&self, start: Vertex) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &a in &self.out_arcs[v] {
                let h = self.arcs[a].head;
                if !seen[h] {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }

    /// True if every waypoint can reach every other waypoint.
    pub fn waypoints_mutually_reachable(&self) -> bool {
        let w0 = self.waypoints[0];
        let fwd = self.reachable_from(w0);
        if !self.waypoints.iter().all(|&w| fwd[w]) {
            return false;
        }
        self.waypoints.iter().all(|&w| self.reachable_from(w)[w0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(t: usize, h: usize) -> Arc {
        Arc::new(t, h, 1, Capacity::Unbounded)
    }

    #[test]
    fn arcs_are_sorted_canonically() {
        let inst = Instance::new(3, vec![arc(2, 0), arc(0, 1), arc(1, 2)], vec![0, 1], None, false)
            .unwrap();
        let order: Vec<_> = inst.arcs().iter().map(|a| (a.tail, a.head)).collect();
        assert_eq!(order, vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(inst.out_arcs(1), &[1]);
        assert_eq!(inst.in_arcs(0), &[2]);
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(Instance::new(2, vec![arc(0, 1)], vec![0], None, false).is_err());
        assert!(Instance::new(2, vec![arc(0, 5)], vec![0, 1], None, false).is_err());
        assert!(Instance::new(2, vec![arc(1, 1)], vec![0, 1], None, false).is_err());
        assert!(Instance::new(2, vec![arc(0, 1), arc(0, 1)], vec![0, 1], None, false).is_err());
        assert!(Instance::new(2, vec![arc(0, 1), arc(0, 1)], vec![0, 1], None, true).is_ok());
        let zero = Arc::new(0, 1, 0, Capacity::Unbounded);
        assert!(Instance::new(2, vec![zero], vec![0, 1], None, false).is_err());
        assert!(Instance::relaxed(2, vec![zero], vec![0], None, false).is_ok());
    }

    #[test]
    fn unbounded_capacity_materializes_as_n() {
        let inst = Instance::new(
            4,
            vec![arc(0, 1), Arc::new(1, 0, 1, Capacity::Finite(2))],
            vec![0, 1],
            None,
            false,
        )
        .unwrap();
        assert_eq!(inst.cap_bound(0), 4);
        assert_eq!(inst.cap_bound(1), 2);
    }
}
