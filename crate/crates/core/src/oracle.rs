//! Brute-force reference solvers.
//!
//! [`solve_held_karp`] is the bitmask DP over waypoints on the metric closure
//! and is exact whenever no capacity is below `|W|`: an optimal walk is a
//! concatenation of `|W|` simple shortest paths, so no arc is used more than
//! `|W|` times. [`solve_enumeration`] handles arbitrary capacities by
//! enumerating balanced, connected arc multiplicity vectors, with each arc
//! used at most `min(capacity, |W|)` times (an arc into `v` is used at most as
//! often as `v` is visited, and an optimal walk never needs more than
//! `|W \ {v}|` visits of `v`).

use crate::error::{Error, Result};
use crate::instance::{ArcId, Instance, Vertex};
use crate::paths::metric_closure;
use crate::solution::Solution;
use crate::walk::{multiset_to_walk, ArcMultiset, ClosedWalk, Dsu};

const HELD_KARP_MAX_WAYPOINTS: usize = 22;

fn capacities_loose(inst: &Instance) -> bool {
    let k = inst.waypoints().len() as u64;
    (0..inst.m()).all(|a| inst.arc(a).capacity.is_unbounded() || inst.cap_bound(a) >= k)
}

/// Capacity-free optimum, or `None` if some waypoint cannot reach another.
fn held_karp_unchecked(inst: &Instance) -> Result<Option<(u64, ClosedWalk)>> {
    let ws = inst.waypoints();
    let k = ws.len();
    if k > HELD_KARP_MAX_WAYPOINTS {
        return Err(Error::TooLarge(format!("{k} waypoints for the bitmask DP")));
    }
    let w0 = ws[0];
    if k == 1 {
        return Ok(Some((0, ClosedWalk::empty(w0))));
    }
    let dm = metric_closure(inst);
    for &a in ws {
        for &b in ws {
            if dm.dist(a, b).is_none() {
                return Ok(None);
            }
        }
    }
    let d = |i: usize, j: usize| dm.dist(ws[i], ws[j]).unwrap();
    // dp[mask][j]: cheapest path from w0 through exactly the waypoints in
    // `mask` (bits for ws[1..]) ending at ws[j + 1].
    let r = k - 1;
    let full = (1usize << r) - 1;
    let mut dp = vec![u64::MAX; (full + 1) * r];
    let mut from = vec![usize::MAX; (full + 1) * r];
    for j in 0..r {
        dp[(1 << j) * r + j] = d(0, j + 1);
    }
    for mask in 1..=full {
        for j in 0..r {
            let cur = dp[mask * r + j];
            if cur == u64::MAX || mask & (1 << j) == 0 {
                continue;
            }
            for nj in 0..r {
                if mask & (1 << nj) != 0 {
                    continue;
                }
                let nm = mask | (1 << nj);
                let cand = cur + d(j + 1, nj + 1);
                if cand < dp[nm * r + nj] {
                    dp[nm * r + nj] = cand;
                    from[nm * r + nj] = j;
                }
            }
        }
    }
    let (best, last) = (0..r)
        .map(|j| (dp[full * r + j] + d(j + 1, 0), j))
        .min()
        .expect("at least one other waypoint");
    let mut order = Vec::with_capacity(k + 1);
    let (mut mask, mut j) = (full, last);
    loop {
        order.push(j + 1);
        let p = from[mask * r + j];
        mask &= !(1 << j);
        if p == usize::MAX {
            break;
        }
        j = p;
    }
    order.push(0);
    order.reverse();
    order.push(0);
    let mut arcs = Vec::new();
    for pair in order.windows(2) {
        arcs.extend(dm.path(ws[pair[0]], ws[pair[1]]).expect("reachable"));
    }
    Ok(Some((best, ClosedWalk::new(w0, arcs))))
}

/// Held–Karp over the waypoints. Requires every capacity to be unbounded or
/// at least `|W|`.
pub fn solve_held_karp(inst: &Instance) -> Result<Solution> {
    if !capacities_loose(inst) {
        return Err(Error::CapacityTooTight);
    }
    Ok(Solution::from_optimum(inst, held_karp_unchecked(inst)?))
}

/// Limits and restrictions for [`solve_enumeration_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumOptions {
    /// Abort with `TooLarge` when the product of per-arc ranges exceeds this.
    pub max_space: f64,
    /// Only consider solutions with at most this many arc occurrences.
    pub max_occurrences: Option<u64>,
    /// Only consider solutions visiting each vertex at most this many times.
    pub max_visits: Option<u64>,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { max_space: 1e9, max_occurrences: None, max_visits: None }
    }
}

pub fn solve_enumeration(inst: &Instance) -> Result<Solution> {
    solve_enumeration_with(inst, EnumOptions::default())
}

/// Size of the multiplicity-vector space searched by the enumeration.
pub fn enumeration_space(inst: &Instance) -> f64 {
    let k = inst.waypoints().len() as u64;
    (0..inst.m())
        .map(|a| (inst.cap_bound(a).min(k) + 1) as f64)
        .product()
}

pub fn solve_enumeration_with(inst: &Instance, opts: EnumOptions) -> Result<Solution> {
    Ok(Solution::from_optimum(inst, enumerate_optimum(inst, opts)?))
}

fn enumerate_optimum(inst: &Instance, opts: EnumOptions) -> Result<Option<(u64, ClosedWalk)>> {
    let space = enumeration_space(inst);
    if space > opts.max_space {
        return Err(Error::TooLarge(format!(
            "{space:.3e} multiplicity vectors exceed the limit {:.3e}",
            opts.max_space
        )));
    }
    let w0 = inst.waypoints()[0];
    if inst.waypoints().len() == 1 {
        return Ok(Some((0, ClosedWalk::empty(w0))));
    }
    // The capacity-free optimum is a lower bound; search with a cost limit
    // that starts there and doubles until a solution appears or the search
    // finishes without ever cutting on the limit.
    let Some((lower, _)) = held_karp_unchecked(inst)? else { return Ok(None) };
    let mut search = Search::new(inst, opts);
    let mut limit = lower.max(1);
    loop {
        search.limit = limit;
        search.best = None;
        search.cut_by_limit = false;
        search.dfs(0, 0);
        if let Some((cost, mult)) = search.best.take() {
            let ms = ArcMultiset { mult };
            let walk = multiset_to_walk(inst, &ms, w0)?;
            return Ok(Some((cost, walk)));
        }
        if !search.cut_by_limit {
            return Ok(None);
        }
        limit = limit.saturating_mul(2);
    }
}

struct Search<'a> {
    inst: &'a Instance,
    order: Vec<ArcId>,
    bound: Vec<u64>,
    // rem_out[i][v]: sum of bounds of out-arcs of v at positions >= i.
    rem_out: Vec<Vec<u64>>,
    rem_in: Vec<Vec<u64>>,
    // min_out[i][v]: cheapest out-arc of v at positions >= i.
    min_out: Vec<Vec<u64>>,
    // last position of an arc incident to v (None if isolated).
    last_incident: Vec<Option<usize>>,
    mult: Vec<u64>,
    out_deg: Vec<u64>,
    in_deg: Vec<u64>,
    touched: Vec<u32>,
    total: u64,
    max_occurrences: Option<u64>,
    max_visits: Option<u64>,
    limit: u64,
    best: Option<(u64, Vec<u64>)>,
    cut_by_limit: bool,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, opts: EnumOptions) -> Self {
        let n = inst.n();
        let k = inst.waypoints().len() as u64;
        // Order vertices by BFS over the underlying graph from w0, then arcs
        // by the later of their endpoints, so vertices close early.
        let mut rank = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        let mut next = 0;
        for root in std::iter::once(inst.waypoints()[0]).chain(0..n) {
            if rank[root] != usize::MAX {
                continue;
            }
            rank[root] = next;
            next += 1;
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                let nbrs = inst
                    .out_arcs(v)
                    .iter()
                    .map(|&a| inst.arc(a).head)
                    .chain(inst.in_arcs(v).iter().map(|&a| inst.arc(a).tail));
                for u in nbrs.collect::<Vec<_>>() {
                    if rank[u] == usize::MAX {
                        rank[u] = next;
                        next += 1;
                        queue.push_back(u);
                    }
                }
            }
        }
        let mut order: Vec<ArcId> = (0..inst.m()).collect();
        order.sort_by_key(|&a| {
            let arc = inst.arc(a);
            (rank[arc.tail].max(rank[arc.head]), rank[arc.tail].min(rank[arc.head]), a)
        });
        let bound: Vec<u64> = order.iter().map(|&a| inst.cap_bound(a).min(k)).collect();
        let m = order.len();
        let mut rem_out = vec![vec![0; n]; m + 1];
        let mut rem_in = vec![vec![0; n]; m + 1];
        let mut min_out = vec![vec![u64::MAX; n]; m + 1];
        for i in (0..m).rev() {
            rem_out[i] = rem_out[i + 1].clone();
            rem_in[i] = rem_in[i + 1].clone();
            min_out[i] = min_out[i + 1].clone();
            let arc = inst.arc(order[i]);
            rem_out[i][arc.tail] += bound[i];
            rem_in[i][arc.head] += bound[i];
            min_out[i][arc.tail] = min_out[i][arc.tail].min(arc.weight);
        }
        let mut last_incident = vec![None; n];
        for (i, &a) in order.iter().enumerate() {
            last_incident[inst.arc(a).tail] = Some(i);
            last_incident[inst.arc(a).head] = Some(i);
        }
        Search {
            inst,
            order,
            bound,
            rem_out,
            rem_in,
            min_out,
            last_incident,
            mult: vec![0; inst.m()],
            out_deg: vec![0; n],
            in_deg: vec![0; n],
            touched: vec![0; n],
            total: 0,
            max_occurrences: opts.max_occurrences,
            max_visits: opts.max_visits,
            limit: 0,
            best: None,
            cut_by_limit: false,
        }
    }

    fn vertex_ok(&self, v: Vertex, i: usize) -> bool {
        let net = self.out_deg[v] as i64 - self.in_deg[v] as i64;
        if net > self.rem_in[i][v] as i64 || -net > self.rem_out[i][v] as i64 {
            return false;
        }
        if let Some(cap) = self.max_visits {
            if self.in_deg[v] > cap || self.out_deg[v] > cap {
                return false;
            }
        }
        if self.touched[v] == 0 && self.inst.is_waypoint(v) {
            match self.last_incident[v] {
                Some(last) if last >= i => {}
                _ => return false,
            }
        }
        true
    }

    fn lower_bound(&self, i: usize) -> u64 {
        let mut lb = 0u64;
        for v in 0..self.inst.n() {
            if self.in_deg[v] > self.out_deg[v] {
                let w = self.min_out[i][v];
                if w == u64::MAX {
                    return u64::MAX;
                }
                lb += (self.in_deg[v] - self.out_deg[v]) * w;
            }
        }
        lb
    }

    fn dfs(&mut self, i: usize, cost: u64) {
        if i == self.order.len() {
            self.leaf(cost);
            return;
        }
        let a = self.order[i];
        let arc = *self.inst.arc(a);
        for c in 0..=self.bound[i] {
            let new_cost = cost + c * arc.weight;
            if let Some(b) = self.best.as_ref().map(|b| b.0) {
                if new_cost >= b {
                    break;
                }
            }
            if new_cost > self.limit {
                self.cut_by_limit = true;
                break;
            }
            if let Some(mo) = self.max_occurrences {
                if self.total + c > mo {
                    break;
                }
            }
            self.set(a, c as i64);
            let ok = self.vertex_ok(arc.tail, i + 1) && self.vertex_ok(arc.head, i + 1);
            if ok {
                let lb = self.lower_bound(i + 1);
                let bound_hit = lb != u64::MAX && new_cost + lb > self.limit;
                if bound_hit {
                    self.cut_by_limit = true;
                } else if lb != u64::MAX
                    && self.best.as_ref().is_none_or(|b| new_cost + lb < b.0)
                {
                    self.dfs(i + 1, new_cost);
                }
            }
            self.set(a, -(c as i64));
        }
    }

    fn set(&mut self, a: ArcId, delta: i64) {
        if delta == 0 {
            return;
        }
        let arc = self.inst.arc(a);
        let d = delta.unsigned_abs();
        if delta > 0 {
            self.mult[a] += d;
            self.out_deg[arc.tail] += d;
            self.in_deg[arc.head] += d;
            self.total += d;
            self.touched[arc.tail] += 1;
            self.touched[arc.head] += 1;
        } else {
            self.mult[a] -= d;
            self.out_deg[arc.tail] -= d;
            self.in_deg[arc.head] -= d;
            self.total -= d;
            self.touched[arc.tail] -= 1;
            self.touched[arc.head] -= 1;
        }
    }

    fn leaf(&mut self, cost: u64) {
        if self.total == 0 {
            return;
        }
        let inst = self.inst;
        let mut dsu = Dsu::new(inst.n());
        for (a, &c) in self.mult.iter().enumerate() {
            if c > 0 {
                dsu.union(inst.arc(a).tail, inst.arc(a).head);
            }
        }
        let root = dsu.find(inst.waypoints()[0]);
        for v in 0..inst.n() {
            if self.touched[v] > 0 && dsu.find(v) != root {
                return;
            }
        }
        if self.best.as_ref().is_none_or(|b| cost < b.0) {
            self.best = Some((cost, self.mult.clone()));
        }
    }
}

/// Held–Karp when capacities are loose; otherwise the capacity-free optimum
/// if its witness happens to respect capacities (it is a lower bound), and
/// the enumeration if not.
pub fn oracle_solve(inst: &Instance) -> Result<Solution> {
    oracle_solve_with(inst, EnumOptions::default())
}

pub fn oracle_solve_with(inst: &Instance, opts: EnumOptions) -> Result<Solution> {
    if capacities_loose(inst) {
        let hk = solve_held_karp(inst)?;
        if cfg!(debug_assertions) && enumeration_space(inst) <= 1e6 {
            let en = solve_enumeration(inst)?;
            assert_eq!(hk.cost(), en.cost(), "Held-Karp and enumeration disagree");
        }
        return Ok(hk);
    }
    if let Some((cost, walk)) = held_karp_unchecked(inst)? {
        let ms = walk.multiset(inst);
        if ms.mult.iter().enumerate().all(|(a, &c)| c <= inst.cap_bound(a)) {
            return Ok(Solution::from_optimum(inst, Some((cost, walk))));
        }
    } else {
        return Ok(Solution::Infeasible);
    }
    solve_enumeration_with(inst, opts)
}
