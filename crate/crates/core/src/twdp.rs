//! Dynamic program over a nice tree decomposition, exact for walks that
//! visit every vertex at most `ν` times (with `ν = |W|` this is the plain
//! optimum).
//!
//! A table entry at node `x` is keyed by a partition of the bag (which bag
//! vertices the partial solution connects), and how often each bag vertex is
//! entered and left. It stores the cheapest set of walks in the graph
//! introduced below `x` that starts and ends in the bag, visits every
//! forgotten waypoint and respects visit bounds and capacities. The first
//! waypoint is never forgotten, so the root bag is just that vertex.
//!
//! Entries are generated forward from the child tables, so only reachable
//! keys are stored. One introduce-edge node handles every arc between its
//! two endpoints.

use std::collections::HashMap;
use std::hash::BuildHasherDefault;
use std::collections::hash_map::DefaultHasher;

use crate::error::{Error, Result};
use crate::instance::{ArcId, Instance, Vertex};
use crate::solution::Solution;
use crate::structparams::{nice_decomposition, NiceTreeDecomposition, NodeKind};
use crate::walk::{multiset_to_walk, validate_walk, ArcMultiset};

type FixedMap<K, V> = HashMap<K, V, BuildHasherDefault<DefaultHasher>>;

/// Bag-local state: block label, entries and exits per bag position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DpKey {
    pub block: Vec<u8>,
    pub ins: Vec<u8>,
    pub outs: Vec<u8>,
}

impl DpKey {
    /// Relabels blocks by first appearance.
    fn canonical(mut self) -> Self {
        let mut map = [u8::MAX; 256];
        let mut next = 0;
        for b in self.block.iter_mut() {
            if map[*b as usize] == u8::MAX {
                map[*b as usize] = next;
                next += 1;
            }
            *b = map[*b as usize];
        }
        self
    }

    fn merge(&mut self, a: u8, b: u8) {
        if a != b {
            for x in self.block.iter_mut() {
                if *x == b {
                    *x = a;
                }
            }
        }
    }

    fn remove(&self, p: usize) -> DpKey {
        let mut k = self.clone();
        k.block.remove(p);
        k.ins.remove(p);
        k.outs.remove(p);
        k.canonical()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Back {
    Leaf,
    Child(usize),
    Edge(usize, Vec<(ArcId, u64)>),
    Join(usize, usize),
}

#[derive(Debug, Clone)]
pub struct DpEntry {
    pub key: DpKey,
    pub cost: u64,
    pub back: Back,
}

#[derive(Debug, Clone, Default)]
pub struct DpTable {
    pub entries: Vec<DpEntry>,
    index: FixedMap<DpKey, usize>,
}

impl DpTable {
    fn offer(&mut self, key: DpKey, cost: u64, back: Back) {
        match self.index.get(&key) {
            Some(&i) => {
                if cost < self.entries[i].cost {
                    self.entries[i].cost = cost;
                    self.entries[i].back = back;
                }
            }
            None => {
                self.index.insert(key.clone(), self.entries.len());
                self.entries.push(DpEntry { key, cost, back });
            }
        }
    }

    pub fn get(&self, key: &DpKey) -> Option<u64> {
        self.index.get(key).map(|&i| self.entries[i].cost)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub const DEFAULT_MAX_ENTRIES: usize = 20_000_000;

/// A finished run: the decomposition, every table and the answer.
#[derive(Debug, Clone)]
pub struct TwdpRun {
    pub nice: NiceTreeDecomposition,
    pub tables: Vec<DpTable>,
    pub nu: usize,
    pub anchor: Vertex,
    /// Best root entry index, if any.
    pub best: Option<usize>,
}

impl TwdpRun {
    /// `min over 1 <= i <= ν` of the root entry `{{w0}}, w0 -> i, w0 -> i`.
    pub fn root_answer(&self) -> Option<u64> {
        let root = &self.tables[self.nice.root];
        (1..=self.nu)
            .filter_map(|i| {
                root.get(&DpKey { block: vec![0], ins: vec![i as u8], outs: vec![i as u8] })
            })
            .min()
    }

    pub fn cost(&self) -> Option<u64> {
        self.best.map(|i| self.tables[self.nice.root].entries[i].cost)
    }

    /// Arc multiplicities of the best solution, from the back-pointers.
    pub fn multiset(&self, inst: &Instance) -> Option<ArcMultiset> {
        let mut ms = ArcMultiset::zero(inst.m());
        let mut stack = vec![(self.nice.root, self.best?)];
        while let Some((x, e)) = stack.pop() {
            let node = &self.nice.nodes[x];
            match &self.tables[x].entries[e].back {
                Back::Leaf => {}
                Back::Child(c) => stack.push((node.children[0], *c)),
                Back::Edge(c, counts) => {
                    for &(a, k) in counts {
                        ms.mult[a] += k;
                    }
                    stack.push((node.children[0], *c));
                }
                Back::Join(a, b) => {
                    stack.push((node.children[0], *a));
                    stack.push((node.children[1], *b));
                }
            }
        }
        Some(ms)
    }
}

fn check_size(t: &DpTable, max: usize) -> Result<()> {
    if t.len() > max {
        return Err(Error::TooLarge(format!("more than {max} table entries at one node")));
    }
    Ok(())
}

/// All ways to use the arcs `uv` and `vu` within capacity and the visit
/// bound, given the child's counts at `u` and `v`.
fn edge_choices(
    inst: &Instance,
    uv: &[ArcId],
    vu: &[ArcId],
    room: [u64; 4],
) -> Vec<Vec<(ArcId, u64)>> {
    // room: out(u), in(v), out(v), in(u) still available.
    let arcs: Vec<(ArcId, bool)> =
        uv.iter().map(|&a| (a, true)).chain(vu.iter().map(|&a| (a, false))).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        inst: &Instance,
        arcs: &[(ArcId, bool)],
        i: usize,
        fwd: u64,
        bwd: u64,
        room: [u64; 4],
        cur: &mut Vec<(ArcId, u64)>,
        out: &mut Vec<Vec<(ArcId, u64)>>,
    ) {
        if i == arcs.len() {
            out.push(cur.iter().copied().filter(|&(_, k)| k > 0).collect());
            return;
        }
        let (a, forward) = arcs[i];
        let left = if forward { room[0].min(room[1]) - fwd } else { room[2].min(room[3]) - bwd };
        for k in 0..=left.min(inst.cap_bound(a)) {
            cur.push((a, k));
            let (f, b) = if forward { (fwd + k, bwd) } else { (fwd, bwd + k) };
            rec(inst, arcs, i + 1, f, b, room, cur, out);
            cur.pop();
        }
    }
    rec(inst, &arcs, 0, 0, 0, room, &mut cur, &mut out);
    out
}

/// Runs the dynamic program. `nu = None` uses `|W|`.
pub fn twdp_run(inst: &Instance, nu: Option<usize>, max_entries: usize) -> Result<TwdpRun> {
    let nu = nu.unwrap_or(inst.waypoints().len());
    if nu == 0 {
        return Err(Error::Semantic("visit bound must be at least 1".into()));
    }
    if nu > 200 {
        return Err(Error::TooLarge(format!("visit bound {nu}")));
    }
    let anchor = inst.waypoints()[0];
    let nice = nice_decomposition(inst, anchor)?;
    let nub = nu as u8;
    let mut tables: Vec<DpTable> = Vec::with_capacity(nice.nodes.len());
    for (x, node) in nice.nodes.iter().enumerate() {
        let mut t = DpTable::default();
        match node.kind {
            NodeKind::Leaf => {
                t.offer(DpKey { block: vec![], ins: vec![], outs: vec![] }, 0, Back::Leaf);
            }
            NodeKind::IntroduceVertex(v) => {
                let p = node.bag.binary_search(&v).unwrap();
                for (i, e) in tables[node.children[0]].entries.iter().enumerate() {
                    let mut k = e.key.clone();
                    k.block.insert(p, u8::MAX);
                    k.ins.insert(p, 0);
                    k.outs.insert(p, 0);
                    t.offer(k.canonical(), e.cost, Back::Child(i));
                }
            }
            NodeKind::IntroduceEdge(u, v) => {
                let (pu, pv) = (node.bag.binary_search(&u).unwrap(), node.bag.binary_search(&v).unwrap());
                let uv: Vec<ArcId> = inst.out_arcs(u).iter().copied().filter(|&a| inst.arc(a).head == v).collect();
                let vu: Vec<ArcId> = inst.out_arcs(v).iter().copied().filter(|&a| inst.arc(a).head == u).collect();
                for (i, e) in tables[node.children[0]].entries.iter().enumerate() {
                    let k = &e.key;
                    let room = [
                        (nub - k.outs[pu]) as u64,
                        (nub - k.ins[pv]) as u64,
                        (nub - k.outs[pv]) as u64,
                        (nub - k.ins[pu]) as u64,
                    ];
                    for counts in edge_choices(inst, &uv, &vu, room) {
                        if counts.is_empty() {
                            t.offer(k.clone(), e.cost, Back::Child(i));
                            continue;
                        }
                        let mut nk = k.clone();
                        let mut add = 0;
                        for &(a, c) in &counts {
                            add += c * inst.arc(a).weight;
                            if inst.arc(a).tail == u {
                                nk.outs[pu] += c as u8;
                                nk.ins[pv] += c as u8;
                            } else {
                                nk.outs[pv] += c as u8;
                                nk.ins[pu] += c as u8;
                            }
                        }
                        let (bu, bv) = (nk.block[pu], nk.block[pv]);
                        nk.merge(bu, bv);
                        t.offer(nk.canonical(), e.cost + add, Back::Edge(i, counts));
                    }
                }
            }
            NodeKind::Forget(v) => {
                let child = node.children[0];
                let p = nice.nodes[child].bag.binary_search(&v).unwrap();
                for (i, e) in tables[child].entries.iter().enumerate() {
                    let k = &e.key;
                    if k.ins[p] != k.outs[p] {
                        continue;
                    }
                    let shared = k.block.iter().enumerate().any(|(q, &b)| q != p && b == k.block[p]);
                    let ok = if k.ins[p] == 0 { !inst.is_waypoint(v) && !shared } else { shared };
                    if ok {
                        t.offer(k.remove(p), e.cost, Back::Child(i));
                    }
                }
            }
            NodeKind::Join => {
                let (ty, tz) = (&tables[node.children[0]], &tables[node.children[1]]);
                for (i, a) in ty.entries.iter().enumerate() {
                    for (j, b) in tz.entries.iter().enumerate() {
                        let fits = (0..a.key.ins.len())
                            .all(|q| a.key.ins[q] + b.key.ins[q] <= nub && a.key.outs[q] + b.key.outs[q] <= nub);
                        if !fits {
                            continue;
                        }
                        let mut k = a.key.clone();
                        for q in 0..k.ins.len() {
                            k.ins[q] += b.key.ins[q];
                            k.outs[q] += b.key.outs[q];
                        }
                        // Finest common coarsening: merge blocks of `a` along
                        // the blocks of `b`.
                        for q in 0..k.block.len() {
                            for r in q + 1..k.block.len() {
                                if b.key.block[q] == b.key.block[r] {
                                    let (x, y) = (k.block[q], k.block[r]);
                                    k.merge(x, y);
                                }
                            }
                        }
                        debug_assert!((0..k.ins.len()).all(|q| k.ins[q] == a.key.ins[q] + b.key.ins[q]));
                        t.offer(k.canonical(), a.cost + b.cost, Back::Join(i, j));
                    }
                }
            }
        }
        check_size(&t, max_entries)?;
        debug_assert_eq!(tables.len(), x);
        tables.push(t);
    }
    let root = &tables[nice.root];
    let mut best: Option<usize> = None;
    for i in 1..=nub {
        let key = DpKey { block: vec![0], ins: vec![i], outs: vec![i] };
        if let Some(&e) = root.index.get(&key) {
            if best.is_none_or(|b| root.entries[e].cost < root.entries[b].cost) {
                best = Some(e);
            }
        }
    }
    Ok(TwdpRun { nice, tables, nu, anchor, best })
}

pub fn solve_twdp(inst: &Instance, nu: Option<usize>) -> Result<Solution> {
    let run = twdp_run(inst, nu, DEFAULT_MAX_ENTRIES)?;
    let Some(cost) = run.cost() else { return Ok(Solution::Infeasible) };
    let ms = run.multiset(inst).expect("best entry exists");
    let walk = multiset_to_walk(inst, &ms, run.anchor)?;
    let report = validate_walk(&inst.with_budget(None), &walk);
    if !report.valid || report.cost != cost {
        return Err(Error::Internal(format!(
            "reconstructed walk is invalid ({:?}) or costs {} instead of {cost}",
            report.violations, report.cost
        )));
    }
    Ok(Solution::from_optimum(inst, Some((cost, walk))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Arc, Capacity};
    use crate::oracle::oracle_solve;

    fn bidirected(n: usize, edges: &[(usize, usize)], w: Vec<usize>) -> Instance {
        let arcs = edges
            .iter()
            .flat_map(|&(u, v)| [Arc::new(u, v, 1, Capacity::Unbounded), Arc::new(v, u, 1, Capacity::Unbounded)])
            .collect();
        Instance::new(n, arcs, w, None, false).unwrap()
    }

    #[test]
    fn two_cycle() {
        let inst = bidirected(2, &[(0, 1)], vec![0, 1]);
        assert_eq!(solve_twdp(&inst, Some(2)).unwrap().cost(), Some(2));
    }

    #[test]
    fn star_needs_two_center_visits() {
        let inst = bidirected(3, &[(0, 1), (0, 2)], vec![0, 1, 2]);
        assert_eq!(solve_twdp(&inst, Some(1)).unwrap(), Solution::Infeasible);
        assert_eq!(solve_twdp(&inst, Some(2)).unwrap().cost(), Some(4));
    }

    #[test]
    fn parallel_arcs() {
        let arcs = vec![
            Arc::new(0, 1, 3, Capacity::Finite(1)),
            Arc::new(0, 1, 1, Capacity::Finite(1)),
            Arc::new(1, 0, 1, Capacity::Unbounded),
            Arc::new(1, 2, 1, Capacity::Unbounded),
            Arc::new(2, 1, 1, Capacity::Unbounded),
        ];
        let inst = Instance::new(3, arcs, vec![0, 2], None, true).unwrap();
        let sol = solve_twdp(&inst, None).unwrap();
        assert_eq!(sol.cost(), oracle_solve(&inst).unwrap().cost());
        assert!(sol.witness_ok(&inst));
    }

    #[test]
    fn root_answer_matches() {
        let inst = bidirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], vec![1, 3]);
        let run = twdp_run(&inst, None, DEFAULT_MAX_ENTRIES).unwrap();
        assert_eq!(run.root_answer(), run.cost());
        assert_eq!(run.cost(), oracle_solve(&inst).unwrap().cost());
    }

    #[test]
    fn monotone_in_nu() {
        let inst = bidirected(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], vec![1, 2, 3, 4]);
        let costs: Vec<Option<u64>> = (1..=5).map(|nu| solve_twdp(&inst, Some(nu)).unwrap().cost()).collect();
        assert_eq!(costs[0], None);
        assert_eq!(costs[3], Some(8));
        assert_eq!(costs[4], Some(8));
        for w in costs.windows(2) {
            assert!(w[1].unwrap_or(u64::MAX) <= w[0].unwrap_or(u64::MAX));
        }
    }
}
