//! Solver parameterized by the feedback edge number `k` of the underlying
//! graph.
//!
//! Pendant vertices are reduced away first. What remains decomposes into at
//! most `5k - 2` paths between the branch set `X` (endpoints of feedback
//! edges and vertices of forest degree at least 3). Every path is visited by
//! an optimal walk in one of seven ways: passes in one or both directions,
//! an out-and-back visit from one or both endpoints, or not at all. Loop
//! visits have a fixed precomputed cost; passes are compiled into a
//! subdivided arc whose middle vertex must be visited. For each type
//! assignment the compressed instance on `X` plus the subdivision vertices
//! is solved exactly, and the best assignment is expanded back into a walk.
//!
//! Once an assignment is fixed every pass gadget is used at least once, so
//! the support of the compressed walk is determined by the assignment and
//! only the pass multiplicities remain: a min-cost circulation with lower
//! bound 1 on each gadget, solved with successive shortest paths.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::{Arc, Capacity, Instance, Vertex};
use crate::solution::Solution;
use crate::structparams::{feedback_edge_set, UnderlyingGraph};
use crate::walk::{multiset_to_walk, validate_walk, ArcMultiset, ClosedWalk, Dsu};

/// Instance after exhaustive degree-one reduction, in original vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedInstance {
    pub alive: Vec<bool>,
    pub waypoint: Vec<bool>,
    /// Weight of the pendant excursions already paid for.
    pub decrement: u64,
    /// Excursions `u -> v -> u` in removal order.
    pub excursions: Vec<(Vertex, Vertex)>,
}

impl ReducedInstance {
    pub fn vertices(&self) -> Vec<Vertex> {
        (0..self.alive.len()).filter(|&v| self.alive[v]).collect()
    }

    pub fn underlying(&self, inst: &Instance) -> UnderlyingGraph {
        UnderlyingGraph::new(
            inst.n(),
            inst.arcs()
                .iter()
                .filter(|a| self.alive[a.tail] && self.alive[a.head])
                .map(|a| (a.tail, a.head)),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    Reduced(ReducedInstance),
    Reject,
}

/// Applies the pendant-vertex rule until no vertex of the underlying graph
/// has exactly one neighbor. Vertices outside the weak component of the
/// waypoints are dropped first; waypoints in different components reject.
pub fn apply_degree_one_reductions(inst: &Instance) -> Reduction {
    let n = inst.n();
    let g = UnderlyingGraph::of(inst);
    let mut alive = vec![false; n];
    let comps = g.components_within(&vec![true; n]);
    let home = comps
        .iter()
        .find(|c| c.binary_search(&inst.waypoints()[0]).is_ok())
        .expect("every vertex is in a component");
    if inst.waypoints().iter().any(|w| home.binary_search(w).is_err()) {
        return Reduction::Reject;
    }
    for &v in home {
        alive[v] = true;
    }
    let mut waypoint = vec![false; n];
    for &w in inst.waypoints() {
        waypoint[w] = true;
    }
    let mut degree: Vec<usize> = (0..n)
        .map(|v| if alive[v] { g.adj[v].iter().filter(|&&u| alive[u]).count() } else { 0 })
        .collect();
    let mut queue: BTreeSet<Vertex> = (0..n).filter(|&v| alive[v] && degree[v] == 1).collect();
    let mut decrement = 0;
    let mut excursions = Vec::new();
    let mut waypoints_left = (0..n).filter(|&v| waypoint[v]).count();
    while let Some(v) = queue.pop_first() {
        if !alive[v] || degree[v] != 1 {
            continue;
        }
        let u = *g.adj[v].iter().find(|&&u| alive[u]).expect("degree is 1");
        if waypoint[v] {
            // a lone waypoint never has to leave
            if waypoints_left == 1 {
                continue;
            }
            if waypoint[u] {
                waypoints_left -= 1;
            }
            let (Some(uv), Some(vu)) = (inst.find_arc(u, v), inst.find_arc(v, u)) else {
                return Reduction::Reject;
            };
            decrement += inst.arc(uv).weight + inst.arc(vu).weight;
            waypoint[u] = true;
            excursions.push((u, v));
        }
        alive[v] = false;
        degree[v] = 0;
        degree[u] -= 1;
        if degree[u] == 1 {
            queue.insert(u);
        }
    }
    Reduction::Reduced(ReducedInstance { alive, waypoint, decrement, excursions })
}

/// Paths between branch vertices plus the feedback edges as one-edge paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCatalog {
    pub x: Vec<Vertex>,
    /// Vertex sequences; the first and last vertex are in `x`.
    pub paths: Vec<Vec<Vertex>>,
    /// Number of leading entries of `paths` that are forest paths.
    pub forest_paths: usize,
}

pub fn decompose_paths(
    red: &ReducedInstance,
    g: &UnderlyingGraph,
    f: &[(Vertex, Vertex)],
) -> PathCatalog {
    let n = g.n;
    let fset: BTreeSet<(Vertex, Vertex)> = f.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    let forest_nbrs: Vec<Vec<Vertex>> = (0..n)
        .map(|v| {
            g.adj[v]
                .iter()
                .copied()
                .filter(|&u| !fset.contains(&(u.min(v), u.max(v))))
                .collect()
        })
        .collect();
    let mut in_x = vec![false; n];
    for &(u, v) in &fset {
        in_x[u] = true;
        in_x[v] = true;
    }
    for v in 0..n {
        if red.alive[v] && forest_nbrs[v].len() >= 3 {
            in_x[v] = true;
        }
    }
    let x: Vec<Vertex> = (0..n).filter(|&v| in_x[v]).collect();
    let mut paths = Vec::new();
    for &s in &x {
        for &first in &forest_nbrs[s] {
            let mut path = vec![s, first];
            let (mut prev, mut cur) = (s, first);
            while !in_x[cur] {
                let next = *forest_nbrs[cur]
                    .iter()
                    .find(|&&u| u != prev)
                    .expect("internal path vertices have forest degree 2");
                path.push(next);
                prev = cur;
                cur = next;
            }
            // Each path is found from both ends; keep one orientation.
            let end = (cur, prev);
            if (s, first) < end {
                paths.push(path);
            }
        }
    }
    let forest_paths = paths.len();
    paths.extend(fset.iter().map(|&(u, v)| vec![u, v]));
    PathCatalog { x, paths, forest_paths }
}

/// The seven ways a path can be visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathType {
    /// Every visit is a pass from the first to the last vertex.
    PassForward,
    /// Every visit is a pass from the last to the first vertex.
    PassBackward,
    /// Passes in both directions and nothing else.
    PassBoth,
    /// One out-and-back visit from the first vertex.
    LoopFirst,
    /// One out-and-back visit from the last vertex.
    LoopLast,
    /// Out-and-back visits from both ends.
    LoopBoth,
    /// Not visited.
    Unvisited,
}

pub const ALL_TYPES: [PathType; 7] = [
    PathType::PassForward,
    PathType::PassBackward,
    PathType::PassBoth,
    PathType::LoopFirst,
    PathType::LoopLast,
    PathType::LoopBoth,
    PathType::Unvisited,
];

/// Cost of a directed pass and the smallest capacity along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pass {
    pub cost: u64,
    pub capacity: Capacity,
}

/// Type costs of one path; `None` marks an unavailable type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCostTable {
    pub forward: Option<Pass>,
    pub backward: Option<Pass>,
    pub loop_first: Option<u64>,
    pub loop_last: Option<u64>,
    /// Best split for out-and-back visits from both ends: cost and the index
    /// of the furthest internal vertex reached from the first end and the
    /// nearest one reached from the last end.
    pub loop_both: Option<(u64, usize, usize)>,
    pub unvisited: Option<u64>,
    /// Indices of internal waypoints along the path.
    pub internal_waypoints: Vec<usize>,
}

impl TypeCostTable {
    /// Fixed cost charged for the type outside the compressed instance, plus
    /// one use of each pass; `None` if unavailable.
    pub fn min_contribution(&self, t: PathType) -> Option<u64> {
        match t {
            PathType::PassForward => self.forward.map(|p| p.cost),
            PathType::PassBackward => self.backward.map(|p| p.cost),
            PathType::PassBoth => Some(self.forward?.cost + self.backward?.cost),
            PathType::LoopFirst => self.loop_first,
            PathType::LoopLast => self.loop_last,
            PathType::LoopBoth => self.loop_both.map(|x| x.0),
            PathType::Unvisited => self.unvisited,
        }
    }

    /// Types worth branching on: passes only if the path has no internal
    /// waypoint or `Unvisited`; loops only if it has one.
    pub fn candidate_types(&self) -> Vec<PathType> {
        let has_w = !self.internal_waypoints.is_empty();
        ALL_TYPES
            .iter()
            .copied()
            .filter(|&t| match t {
                PathType::Unvisited => !has_w,
                PathType::LoopFirst | PathType::LoopLast | PathType::LoopBoth => has_w,
                _ => true,
            })
            .filter(|&t| self.min_contribution(t).is_some())
            .collect()
    }
}

fn min_capacity(a: Capacity, b: Capacity) -> Capacity {
    match (a, b) {
        (Capacity::Unbounded, c) | (c, Capacity::Unbounded) => c,
        (Capacity::Finite(x), Capacity::Finite(y)) => Capacity::Finite(x.min(y)),
    }
}

fn directed_pass(inst: &Instance, seq: &[Vertex]) -> Option<Pass> {
    let mut cost = 0;
    let mut capacity = Capacity::Unbounded;
    for w in seq.windows(2) {
        let a = inst.arc(inst.find_arc(w[0], w[1])?);
        cost += a.weight;
        capacity = min_capacity(capacity, a.capacity);
    }
    Some(Pass { cost, capacity })
}

/// Cost of walking `path[lo..=hi]` out and back, if both directions exist.
fn round_trip(inst: &Instance, path: &[Vertex], lo: usize, hi: usize) -> Option<u64> {
    let mut cost = 0;
    for i in lo..hi {
        cost += inst.arc(inst.find_arc(path[i], path[i + 1])?).weight;
        cost += inst.arc(inst.find_arc(path[i + 1], path[i])?).weight;
    }
    Some(cost)
}

pub fn path_type_costs(inst: &Instance, red: &ReducedInstance, path: &[Vertex]) -> TypeCostTable {
    let last = path.len() - 1;
    let internal_waypoints: Vec<usize> = (1..last).filter(|&i| red.waypoint[path[i]]).collect();
    let rev: Vec<Vertex> = path.iter().rev().copied().collect();
    let forward = directed_pass(inst, path);
    let backward = directed_pass(inst, &rev);
    let (mut loop_first, mut loop_last, mut loop_both) = (None, None, None);
    if let (Some(&lo), Some(&hi)) = (internal_waypoints.first(), internal_waypoints.last()) {
        loop_first = round_trip(inst, path, 0, hi);
        loop_last = round_trip(inst, path, lo, last);
        for pair in internal_waypoints.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if let (Some(x), Some(y)) = (round_trip(inst, path, 0, a), round_trip(inst, path, b, last))
            {
                if loop_both.is_none_or(|(c, _, _)| x + y < c) {
                    loop_both = Some((x + y, a, b));
                }
            }
        }
    }
    let unvisited = internal_waypoints.is_empty().then_some(0);
    TypeCostTable { forward, backward, loop_first, loop_last, loop_both, unvisited, internal_waypoints }
}

/// One subdivided pass arc of a compressed instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gadget {
    pub path: usize,
    pub forward: bool,
    /// Compressed ids of the pass start, the subdivision vertex, the end.
    pub from: usize,
    pub mid: usize,
    pub to: usize,
    pub pass: Pass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedInstance {
    pub instance: Instance,
    /// Original vertex of each compressed vertex in `X` (ids `0..|X|`).
    pub x: Vec<Vertex>,
    pub gadgets: Vec<Gadget>,
    /// Cost paid outside the compressed instance: pendant excursions and
    /// loop visits.
    pub offset: u64,
}

fn x_index(catalog: &PathCatalog, v: Vertex) -> usize {
    catalog.x.binary_search(&v).expect("path endpoints are in X")
}

/// Builds the compressed instance for a type assignment, or `None` when the
/// assignment uses an unavailable type, the budget goes negative, or no
/// waypoint is left.
pub fn compress(
    inst: &Instance,
    red: &ReducedInstance,
    catalog: &PathCatalog,
    tables: &[TypeCostTable],
    assignment: &[PathType],
) -> Option<CompressedInstance> {
    let xs = catalog.x.len();
    let mut wp: BTreeSet<usize> =
        (0..xs).filter(|&i| red.waypoint[catalog.x[i]]).collect();
    let mut offset = red.decrement;
    let mut gadgets = Vec::new();
    let mut next = xs;
    for (p, (&t, table)) in assignment.iter().zip(tables).enumerate() {
        let path = &catalog.paths[p];
        let (u, v) = (x_index(catalog, path[0]), x_index(catalog, *path.last().unwrap()));
        let mut add = |forward: bool, pass: Option<Pass>, gadgets: &mut Vec<Gadget>| -> Option<()> {
            let pass = pass?;
            let (from, to) = if forward { (u, v) } else { (v, u) };
            gadgets.push(Gadget { path: p, forward, from, mid: next, to, pass });
            next += 1;
            Some(())
        };
        match t {
            PathType::Unvisited => table.unvisited.map(|_| ())?,
            PathType::LoopFirst => {
                offset += table.loop_first?;
                wp.insert(u);
            }
            PathType::LoopLast => {
                offset += table.loop_last?;
                wp.insert(v);
            }
            PathType::LoopBoth => {
                offset += table.loop_both?.0;
                wp.insert(u);
                wp.insert(v);
            }
            PathType::PassForward => add(true, table.forward, &mut gadgets)?,
            PathType::PassBackward => add(false, table.backward, &mut gadgets)?,
            PathType::PassBoth => {
                add(true, table.forward, &mut gadgets)?;
                add(false, table.backward, &mut gadgets)?;
            }
        }
    }
    let budget = match inst.budget() {
        Some(b) => Some(b.checked_sub(offset)?),
        None => None,
    };
    let mut arcs = Vec::with_capacity(2 * gadgets.len());
    for g in &gadgets {
        wp.insert(g.from);
        wp.insert(g.mid);
        wp.insert(g.to);
        arcs.push(Arc::new(g.from, g.mid, g.pass.cost, g.pass.capacity));
        arcs.push(Arc::new(g.mid, g.to, 0, g.pass.capacity));
    }
    if wp.is_empty() {
        return None;
    }
    let instance = Instance::relaxed(next, arcs, wp.into_iter().collect(), budget, true)
        .expect("compressed instance is well formed");
    Some(CompressedInstance { instance, x: catalog.x.clone(), gadgets, offset })
}

/// Minimum-cost circulation on `nodes` vertices where each arc `(a, b)`
/// carries between 1 and `upper` units at `cost` per unit. Returns the total
/// cost and per-arc flows.
fn min_cost_circulation(nodes: usize, arcs: &[(usize, usize, u64, u64)]) -> Option<(u64, Vec<u64>)> {
    // Residual graph: nodes plus a super source and sink.
    let (s, t) = (nodes, nodes + 1);
    let mut to = Vec::new();
    let mut cap: Vec<i64> = Vec::new();
    let mut cost: Vec<i64> = Vec::new();
    let mut head: Vec<Vec<usize>> = vec![Vec::new(); nodes + 2];
    let mut add = |a: usize, b: usize, c: i64, w: i64, head: &mut Vec<Vec<usize>>| {
        head[a].push(to.len());
        to.push(b);
        cap.push(c);
        cost.push(w);
        head[b].push(to.len());
        to.push(a);
        cap.push(0);
        cost.push(-w);
    };
    let mut excess = vec![0i64; nodes];
    let mut base = 0u64;
    for &(a, b, c, upper) in arcs {
        excess[b] += 1;
        excess[a] -= 1;
        base += c;
        add(a, b, upper as i64 - 1, c as i64, &mut head);
    }
    let mut need = 0;
    for (v, &e) in excess.iter().enumerate() {
        if e > 0 {
            add(s, v, e, 0, &mut head);
            need += e;
        } else if e < 0 {
            add(v, t, -e, 0, &mut head);
        }
    }
    let mut flow_cost = 0i64;
    let mut pushed = 0;
    while pushed < need {
        // Bellman-Ford; the residual graph never has negative cycles.
        let mut dist = vec![i64::MAX; nodes + 2];
        let mut via = vec![usize::MAX; nodes + 2];
        dist[s] = 0;
        for _ in 0..nodes + 2 {
            let mut changed = false;
            for v in 0..nodes + 2 {
                if dist[v] == i64::MAX {
                    continue;
                }
                for &e in &head[v] {
                    if cap[e] > 0 && dist[v] + cost[e] < dist[to[e]] {
                        dist[to[e]] = dist[v] + cost[e];
                        via[to[e]] = e;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[t] == i64::MAX {
            return None;
        }
        let mut amount = need - pushed;
        let mut v = t;
        while v != s {
            let e = via[v];
            amount = amount.min(cap[e]);
            v = to[e ^ 1];
        }
        let mut v = t;
        while v != s {
            let e = via[v];
            cap[e] -= amount;
            cap[e ^ 1] += amount;
            v = to[e ^ 1];
        }
        pushed += amount;
        flow_cost += amount * dist[t];
    }
    let flows = (0..arcs.len()).map(|i| 1 + cap[2 * i + 1] as u64).collect();
    Some((base + flow_cost as u64, flows))
}

/// Statistics of one run, for checking the compressed size bounds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FesStats {
    /// Feedback edge number of the reduced graph.
    pub k: usize,
    pub x_size: usize,
    pub paths: usize,
    /// Assignments that reached evaluation.
    pub branches: u64,
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl FesStats {
    /// Every evaluated compressed instance, and the worst case `|X| + 2|P|`
    /// vertices / `4|P|` edges, within `14k` / `20k`.
    pub fn within_bounds(&self) -> bool {
        let (v, e) = (14 * self.k, 20 * self.k);
        self.max_vertices <= v
            && self.max_edges <= e
            && self.x_size + 2 * self.paths <= v
            && 4 * self.paths <= e
    }
}

struct Branching<'a> {
    tables: &'a [TypeCostTable],
    candidates: Vec<Vec<(PathType, u64)>>,
    suffix_lb: Vec<u64>,
    catalog: &'a PathCatalog,
    x_waypoint: Vec<bool>,
    capacity_of: Box<dyn Fn(Capacity) -> u64 + 'a>,
    assignment: Vec<PathType>,
    best: Option<(u64, Vec<PathType>, Vec<u64>)>,
    stats: FesStats,
}

impl Branching<'_> {
    fn dfs(&mut self, p: usize, acc: u64) {
        if let Some((b, _, _)) = &self.best {
            if acc + self.suffix_lb[p] >= *b {
                return;
            }
        }
        if p == self.candidates.len() {
            self.evaluate(acc);
            return;
        }
        for i in 0..self.candidates[p].len() {
            let (t, c) = self.candidates[p][i];
            self.assignment[p] = t;
            self.dfs(p + 1, acc + c);
        }
    }

    /// `fixed` already includes loop costs and one use of each pass.
    fn evaluate(&mut self, _fixed: u64) {
        let xs = self.catalog.x.len();
        let mut wp = self.x_waypoint.clone();
        let mut loops = 0;
        let mut arcs = Vec::new();
        for (p, &t) in self.assignment.iter().enumerate() {
            let path = &self.catalog.paths[p];
            let u = x_index(self.catalog, path[0]);
            let v = x_index(self.catalog, *path.last().unwrap());
            let tab = &self.tables[p];
            match t {
                PathType::Unvisited => {}
                PathType::LoopFirst => {
                    loops += tab.loop_first.unwrap();
                    wp[u] = true;
                }
                PathType::LoopLast => {
                    loops += tab.loop_last.unwrap();
                    wp[v] = true;
                }
                PathType::LoopBoth => {
                    loops += tab.loop_both.unwrap().0;
                    wp[u] = true;
                    wp[v] = true;
                }
                PathType::PassForward => arcs.push((u, v, tab.forward.unwrap())),
                PathType::PassBackward => arcs.push((v, u, tab.backward.unwrap())),
                PathType::PassBoth => {
                    arcs.push((u, v, tab.forward.unwrap()));
                    arcs.push((v, u, tab.backward.unwrap()));
                }
            }
        }
        self.stats.branches += 1;
        self.stats.max_vertices = self.stats.max_vertices.max(xs + arcs.len());
        self.stats.max_edges = self.stats.max_edges.max(2 * arcs.len());
        // The support is every gadget; it must be connected and reach every
        // waypoint of X.
        let cost = if arcs.is_empty() {
            if wp.iter().filter(|&&b| b).count() != 1 {
                return;
            }
            loops
        } else {
            let mut dsu = Dsu::new(xs);
            for &(a, b, _) in &arcs {
                dsu.union(a, b);
            }
            let root = dsu.find(arcs[0].0);
            if (0..xs).any(|v| wp[v] && dsu.find(v) != root) {
                return;
            }
            let flow_arcs: Vec<(usize, usize, u64, u64)> = arcs
                .iter()
                .map(|&(a, b, pass)| (a, b, pass.cost, (self.capacity_of)(pass.capacity)))
                .collect();
            let Some((c, flows)) = min_cost_circulation(xs, &flow_arcs) else { return };
            if self.best.as_ref().is_none_or(|b| loops + c < b.0) {
                self.best = Some((loops + c, self.assignment.clone(), flows));
            }
            return;
        };
        if self.best.as_ref().is_none_or(|b| cost < b.0) {
            self.best = Some((cost, self.assignment.clone(), Vec::new()));
        }
    }
}

pub fn solve_fes(inst: &Instance) -> Result<Solution> {
    solve_fes_with_stats(inst).map(|(s, _)| s)
}

pub fn solve_fes_with_stats(inst: &Instance) -> Result<(Solution, FesStats)> {
    if inst.has_parallel_arcs() {
        return Err(Error::Unsupported(
            "parallel arcs (the path types assume one arc per direction)".into(),
        ));
    }
    let red = match apply_degree_one_reductions(inst) {
        Reduction::Reject => return Ok((Solution::Infeasible, FesStats::default())),
        Reduction::Reduced(r) => r,
    };
    let g = red.underlying(inst);
    let f = feedback_edge_set(&g);
    let mut stats = FesStats { k: f.len(), ..Default::default() };
    let alive = red.vertices();
    let ws: Vec<Vertex> = alive.iter().copied().filter(|&v| red.waypoint[v]).collect();
    if ws.len() == 1 {
        // The waypoints collapsed onto one vertex: only the excursions remain.
        let walk = splice_excursions(inst, &red, vec![ws[0]])?;
        return finish(inst, red.decrement, walk, stats);
    }
    let catalog = decompose_paths(&red, &g, &f);
    stats.x_size = catalog.x.len();
    stats.paths = catalog.paths.len();
    let tables: Vec<TypeCostTable> =
        catalog.paths.iter().map(|p| path_type_costs(inst, &red, p)).collect();
    let candidates: Vec<Vec<(PathType, u64)>> = tables
        .iter()
        .map(|t| {
            let mut c: Vec<(PathType, u64)> = t
                .candidate_types()
                .into_iter()
                .map(|ty| (ty, t.min_contribution(ty).unwrap()))
                .collect();
            c.sort_by_key(|&(ty, cost)| (cost, ty));
            c
        })
        .collect();
    let inner = inside_one_path(inst, &red, &catalog);
    let inner_only = |stats: FesStats| match &inner {
        Some((c, vs)) => finish(inst, red.decrement + c, splice_excursions(inst, &red, vs.clone())?, stats),
        None => Ok((Solution::Infeasible, stats)),
    };
    if candidates.iter().any(|c| c.is_empty()) {
        return inner_only(stats);
    }
    let mut suffix_lb = vec![0; candidates.len() + 1];
    for p in (0..candidates.len()).rev() {
        suffix_lb[p] = suffix_lb[p + 1] + candidates[p][0].1;
    }
    let n = inst.n() as u64;
    let mut br = Branching {
        tables: &tables,
        suffix_lb,
        catalog: &catalog,
        x_waypoint: catalog.x.iter().map(|&v| red.waypoint[v]).collect(),
        capacity_of: Box::new(move |c: Capacity| c.or(n)),
        assignment: vec![PathType::Unvisited; candidates.len()],
        candidates,
        best: None,
        stats,
    };
    br.dfs(0, 0);
    let stats = br.stats.clone();
    let Some((cost, assignment, flows)) = br.best else {
        return inner_only(stats);
    };
    if inner.as_ref().is_some_and(|i| i.0 < cost) {
        return inner_only(stats);
    }
    let comp = compress(inst, &red, &catalog, &tables, &assignment)
        .ok_or_else(|| Error::Internal("winning assignment does not compress".into()))?;
    let walk = expand(inst, &red, &catalog, &tables, &assignment, &comp, &flows)?;
    finish(inst, red.decrement + cost, walk, stats)
}

/// Walks that avoid `X` stay inside the interior of a single path. When all
/// waypoints lie there, the best such walk runs between the outermost
/// waypoints and back.
fn inside_one_path(
    inst: &Instance,
    red: &ReducedInstance,
    catalog: &PathCatalog,
) -> Option<(u64, Vec<Vertex>)> {
    let ws: Vec<Vertex> = red.vertices().into_iter().filter(|&v| red.waypoint[v]).collect();
    let path = catalog.paths.iter().find(|p| {
        p.len() > 2 && ws.iter().all(|w| p[1..p.len() - 1].contains(w))
    })?;
    let idx: Vec<usize> = (0..path.len()).filter(|&i| red.waypoint[path[i]]).collect();
    let (lo, hi) = (idx[0], *idx.last().unwrap());
    let mut cost = 0;
    for i in lo..hi {
        cost += inst.arc(inst.find_arc(path[i], path[i + 1])?).weight;
        cost += inst.arc(inst.find_arc(path[i + 1], path[i])?).weight;
    }
    Some((cost, out_and_back(path, lo, hi, true)))
}

fn finish(
    inst: &Instance,
    cost: u64,
    vertices: Vec<Vertex>,
    stats: FesStats,
) -> Result<(Solution, FesStats)> {
    let mut walk = walk_from_vertices(inst, &vertices)?;
    if let Some(w) = walk.rotated_to(inst, inst.waypoints()[0]) {
        walk = w;
    }
    let report = validate_walk(&inst.with_budget(None), &walk);
    if !report.valid || report.cost != cost {
        return Err(Error::Internal(format!(
            "reconstructed walk is invalid ({:?}) or costs {} instead of {cost}",
            report.violations, report.cost
        )));
    }
    Ok((Solution::from_optimum(inst, Some((cost, walk))), stats))
}

fn walk_from_vertices(inst: &Instance, vs: &[Vertex]) -> Result<ClosedWalk> {
    let arcs = vs
        .windows(2)
        .map(|w| {
            inst.find_arc(w[0], w[1])
                .ok_or_else(|| Error::Internal(format!("no arc {} -> {}", w[0], w[1])))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosedWalk::new(vs[0], arcs))
}

/// Inserts `detour` (a closed vertex walk starting and ending at
/// `detour[0]`) after the first occurrence of its start.
fn splice(walk: &mut Vec<Vertex>, detour: &[Vertex]) -> Result<()> {
    let at = walk
        .iter()
        .position(|&v| v == detour[0])
        .ok_or_else(|| Error::Internal(format!("vertex {} missing from walk", detour[0])))?;
    walk.splice(at + 1..at + 1, detour[1..].iter().copied());
    Ok(())
}

fn splice_excursions(
    _inst: &Instance,
    red: &ReducedInstance,
    mut walk: Vec<Vertex>,
) -> Result<Vec<Vertex>> {
    for &(u, v) in red.excursions.iter().rev() {
        splice(&mut walk, &[u, v, u])?;
    }
    Ok(walk)
}

fn out_and_back(path: &[Vertex], lo: usize, hi: usize, from_first: bool) -> Vec<Vertex> {
    let seg = &path[lo..=hi];
    let mut out: Vec<Vertex> = if from_first {
        seg.to_vec()
    } else {
        seg.iter().rev().copied().collect()
    };
    let back: Vec<Vertex> = out.iter().rev().skip(1).copied().collect();
    out.extend(back);
    out
}

fn expand(
    inst: &Instance,
    red: &ReducedInstance,
    catalog: &PathCatalog,
    tables: &[TypeCostTable],
    assignment: &[PathType],
    comp: &CompressedInstance,
    flows: &[u64],
) -> Result<Vec<Vertex>> {
    let ci = &comp.instance;
    let mut walk: Vec<Vertex> = if comp.gadgets.is_empty() {
        let only = ci.waypoints()[0];
        vec![comp.x[only]]
    } else {
        // Arcs of the compressed instance are sorted by (tail, head); find
        // each gadget's pair and give both its flow.
        let mut ms = ArcMultiset::zero(ci.m());
        for (g, &t) in comp.gadgets.iter().zip(flows) {
            let a = ci.find_arc(g.from, g.mid).expect("gadget arc");
            let b = ci.find_arc(g.mid, g.to).expect("gadget arc");
            ms.mult[a] = t;
            ms.mult[b] = t;
        }
        let anchor = comp.gadgets[0].from;
        let cw = multiset_to_walk(ci, &ms, anchor)?;
        let mut out = vec![comp.x[anchor]];
        for &a in &cw.arcs {
            let arc = ci.arc(a);
            if arc.head < comp.x.len() {
                // Second half of a gadget: emit the path interior and end.
                let g = comp
                    .gadgets
                    .iter()
                    .find(|g| g.mid == arc.tail)
                    .expect("arc into X leaves a subdivision vertex");
                let path = &catalog.paths[g.path];
                if g.forward {
                    out.extend(path[1..].iter().copied());
                } else {
                    out.extend(path.iter().rev().skip(1).copied());
                }
            }
        }
        out
    };
    for (p, &t) in assignment.iter().enumerate() {
        let path = &catalog.paths[p];
        let last = path.len() - 1;
        let tab = &tables[p];
        let (&lo, &hi) = match (tab.internal_waypoints.first(), tab.internal_waypoints.last()) {
            (Some(a), Some(b)) => (a, b),
            _ => continue,
        };
        match t {
            PathType::LoopFirst => splice(&mut walk, &out_and_back(path, 0, hi, true))?,
            PathType::LoopLast => splice(&mut walk, &out_and_back(path, lo, last, false))?,
            PathType::LoopBoth => {
                let (_, a, b) = tab.loop_both.expect("assigned type is available");
                splice(&mut walk, &out_and_back(path, 0, a, true))?;
                splice(&mut walk, &out_and_back(path, b, last, false))?;
            }
            _ => {}
        }
    }
    splice_excursions(inst, red, walk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_solve;

    fn bidirected(n: usize, edges: &[(usize, usize, u64)], w: Vec<usize>) -> Instance {
        let mut arcs = Vec::new();
        for &(u, v, wt) in edges {
            arcs.push(Arc::new(u, v, wt, Capacity::Unbounded));
            arcs.push(Arc::new(v, u, wt, Capacity::Unbounded));
        }
        Instance::new(n, arcs, w, None, false).unwrap()
    }

    #[test]
    fn pendant_rules() {
        // 0 - 1 - 2 with 2 a non-waypoint leaf: removed for free.
        let inst = bidirected(4, &[(0, 1, 1), (1, 2, 1), (0, 3, 1), (3, 1, 1)], vec![0, 1]);
        let Reduction::Reduced(r) = apply_degree_one_reductions(&inst) else { panic!() };
        assert!(!r.alive[2]);
        assert_eq!(r.decrement, 0);
        // Waypoint leaf with arcs of weight 2 and 3.
        let arcs = vec![
            Arc::new(0, 1, 1, Capacity::Unbounded),
            Arc::new(1, 0, 1, Capacity::Unbounded),
            Arc::new(1, 2, 1, Capacity::Unbounded),
            Arc::new(2, 1, 1, Capacity::Unbounded),
            Arc::new(2, 0, 1, Capacity::Unbounded),
            Arc::new(0, 2, 1, Capacity::Unbounded),
            Arc::new(1, 3, 2, Capacity::Unbounded),
            Arc::new(3, 1, 3, Capacity::Unbounded),
        ];
        let inst = Instance::new(4, arcs, vec![0, 3], None, false).unwrap();
        let Reduction::Reduced(r) = apply_degree_one_reductions(&inst) else { panic!() };
        assert!(r.waypoint[1]);
        assert_eq!(r.decrement, 5);
        // Missing return arc rejects.
        let arcs = vec![
            Arc::new(0, 1, 1, Capacity::Unbounded),
            Arc::new(1, 0, 1, Capacity::Unbounded),
            Arc::new(1, 2, 1, Capacity::Unbounded),
        ];
        let inst = Instance::new(3, arcs, vec![0, 2], None, false).unwrap();
        assert_eq!(apply_degree_one_reductions(&inst), Reduction::Reject);
    }

    #[test]
    fn cycle_catalog() {
        let inst = bidirected(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)], vec![0, 2]);
        let Reduction::Reduced(r) = apply_degree_one_reductions(&inst) else { panic!() };
        let g = r.underlying(&inst);
        let f = feedback_edge_set(&g);
        assert_eq!(f.len(), 1);
        let cat = decompose_paths(&r, &g, &f);
        assert_eq!(cat.x.len(), 2);
        assert_eq!(cat.paths.len(), 2);
    }

    #[test]
    fn theta_catalog_size() {
        // Two hubs 0 and 1 joined by three paths of length 2.
        let inst = bidirected(
            5,
            &[(0, 2, 1), (2, 1, 1), (0, 3, 1), (3, 1, 1), (0, 4, 1), (4, 1, 1)],
            vec![0, 1],
        );
        let Reduction::Reduced(r) = apply_degree_one_reductions(&inst) else { panic!() };
        let g = r.underlying(&inst);
        let f = feedback_edge_set(&g);
        assert_eq!(f.len(), 2);
        let cat = decompose_paths(&r, &g, &f);
        assert!(cat.paths.len() <= 5 * f.len() - 2);
        // Every underlying edge lies on exactly one path.
        let mut covered = 0;
        for p in &cat.paths {
            covered += p.len() - 1;
        }
        assert_eq!(covered, g.m());
    }

    #[test]
    fn type_costs_three_vertex_path() {
        let inst = bidirected(3, &[(0, 1, 1), (1, 2, 1)], vec![0, 1]);
        let red = ReducedInstance {
            alive: vec![true; 3],
            waypoint: vec![true, true, false],
            decrement: 0,
            excursions: vec![],
        };
        let t = path_type_costs(&inst, &red, &[0, 1, 2]);
        assert_eq!(t.loop_first, Some(2));
        assert_eq!(t.loop_last, Some(2));
        assert_eq!(t.loop_both, None);
        assert_eq!(t.forward.map(|p| p.cost), Some(2));
        assert_eq!(t.backward.map(|p| p.cost), Some(2));
        assert_eq!(t.unvisited, None);
        let t = path_type_costs(&inst, &red, &[0, 2]);
        assert_eq!((t.loop_first, t.loop_last, t.loop_both, t.unvisited), (None, None, None, Some(0)));
    }

    #[test]
    fn type_costs_one_way_sides() {
        // u=0, a=1, b=2, v=3; arcs only u<->a and b<->v.
        let arcs = vec![
            Arc::new(0, 1, 1, Capacity::Unbounded),
            Arc::new(1, 0, 1, Capacity::Unbounded),
            Arc::new(3, 2, 1, Capacity::Unbounded),
            Arc::new(2, 3, 1, Capacity::Unbounded),
        ];
        let inst = Instance::new(4, arcs, vec![1, 2], None, false).unwrap();
        let red = ReducedInstance {
            alive: vec![true; 4],
            waypoint: vec![false, true, true, false],
            decrement: 0,
            excursions: vec![],
        };
        let t = path_type_costs(&inst, &red, &[0, 1, 2, 3]);
        assert_eq!(t.loop_both.map(|x| x.0), Some(4));
        assert_eq!(t.forward, None);
        assert_eq!(t.backward, None);
    }

    #[test]
    fn compress_pass_gadget() {
        let inst = bidirected(4, &[(0, 1, 2), (1, 2, 3), (2, 3, 1), (3, 0, 1)], vec![0, 2]);
        let Reduction::Reduced(r) = apply_degree_one_reductions(&inst) else { panic!() };
        let g = r.underlying(&inst);
        let f = feedback_edge_set(&g);
        let cat = decompose_paths(&r, &g, &f);
        let tables: Vec<_> = cat.paths.iter().map(|p| path_type_costs(&inst, &r, p)).collect();
        let assign: Vec<PathType> = tables
            .iter()
            .map(|t| if t.internal_waypoints.is_empty() { PathType::PassBackward } else { PathType::PassForward })
            .collect();
        let c = compress(&inst, &r, &cat, &tables, &assign).unwrap();
        assert_eq!(c.gadgets.len(), 2);
        for g in &c.gadgets {
            let first = c.instance.find_arc(g.from, g.mid).unwrap();
            let second = c.instance.find_arc(g.mid, g.to).unwrap();
            assert_eq!(c.instance.arc(first).weight, g.pass.cost);
            assert_eq!(c.instance.arc(second).weight, 0);
            assert!(c.instance.is_waypoint(g.mid));
        }
        // The circulation agrees with the brute-force oracle on the
        // compressed instance.
        let flow_arcs: Vec<_> = c
            .gadgets
            .iter()
            .map(|g| (g.from, g.to, g.pass.cost, g.pass.capacity.or(inst.n() as u64)))
            .collect();
        let flow = min_cost_circulation(c.x.len(), &flow_arcs).map(|x| x.0);
        assert_eq!(flow, oracle_solve(&c.instance).unwrap().cost());
    }

    #[test]
    fn small_instances_match_oracle() {
        let two = bidirected(2, &[(0, 1, 1)], vec![0, 1]);
        assert_eq!(solve_fes(&two).unwrap().cost(), Some(2));
        let star = bidirected(3, &[(0, 1, 1), (0, 2, 1)], vec![0, 1, 2]);
        assert_eq!(solve_fes(&star).unwrap().cost(), Some(4));
        let tri = Instance::new(
            3,
            (0..3).map(|i| Arc::new(i, (i + 1) % 3, 1, Capacity::Unbounded)).collect(),
            vec![0, 1, 2],
            None,
            false,
        )
        .unwrap();
        let (s, stats) = solve_fes_with_stats(&tri).unwrap();
        assert_eq!(s.cost(), Some(3));
        assert!(stats.within_bounds());
        let lollipop = bidirected(
            5,
            &[(0, 1, 1), (1, 2, 2), (2, 0, 1), (2, 3, 1), (3, 4, 5)],
            vec![1, 4],
        );
        assert_eq!(solve_fes(&lollipop).unwrap().cost(), oracle_solve(&lollipop).unwrap().cost());
    }

    #[test]
    fn last_waypoint_is_not_pushed_off() {
        // 2 - 0 - 1 with waypoints 0, 1: after 1 folds into 0, the leaf 0 must
        // stay put rather than fold into 2
        let arcs = [(0, 1, 2), (1, 0, 1), (0, 2, 1), (2, 0, 1)]
            .iter()
            .map(|&(t, h, w)| Arc::new(t, h, w, Capacity::Unbounded))
            .collect();
        let inst = Instance::new(3, arcs, vec![0, 1], None, false).unwrap();
        assert_eq!(solve_fes(&inst).unwrap().cost(), Some(3));
    }

    #[test]
    fn walk_inside_one_path() {
        // 4-cycle 2 - 0 - 1 - 3 - 2 where the cheap walk 0 -> 1 -> 0 avoids
        // both ends of the feedback edge
        let arcs = [(0, 1), (1, 0), (0, 2), (2, 3), (3, 1)]
            .iter()
            .map(|&(t, h)| Arc::new(t, h, 1, Capacity::Unbounded))
            .collect();
        let inst = Instance::new(4, arcs, vec![0, 1], None, false).unwrap();
        assert_eq!(solve_fes(&inst).unwrap().cost(), Some(2));
    }

    #[test]
    fn pendant_waypoint_beside_unused_cycle() {
        // 1 hangs off the directed triangle 0 -> 2 -> 3 -> 0 and the walk
        // never needs the triangle
        let arcs = [(0, 1), (1, 0), (0, 2), (2, 3), (3, 0)]
            .iter()
            .map(|&(t, h)| Arc::new(t, h, 1, Capacity::Unbounded))
            .collect();
        let inst = Instance::new(4, arcs, vec![0, 1], None, false).unwrap();
        assert_eq!(solve_fes(&inst).unwrap().cost(), Some(2));
    }
}
