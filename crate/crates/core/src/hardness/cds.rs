//! Capacitated dominating set and its reduction to a routing instance whose
//! budget is three times its terminal count.
//!
//! Text format:
//!
//! ```text
//! cds 1
//! n 3
//! cap 0 1
//! cap 1 2
//! cap 2 1
//! edge 0 1
//! edge 1 2
//! k 1
//! ```
//!
//! Vertex layout of a reduction, in id order: the selection force gadget
//! (`S.*`), the auxiliary force gadget (`A.*`), `x`, `x1`, `x2`, `x3`, then
//! `z_u`, `c_u`, `d_u` for every vertex `u`, then the cover gadgets of the
//! vertices (`E[u].*`) and of the ordered edges (`E[u,v].*`) in
//! lexicographic order, each without its `z_io`, which is shared.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::gadgets::{gen_cover_gadget, gen_force_gadget, GadgetFragment};
use crate::error::{Error, Result};
use crate::format::{parse_err, parse_num, strip_comment, vertices_to_walk};
use crate::instance::{Arc, Capacity, Instance, Vertex};
use crate::walk::ClosedWalk;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdsInstance {
    n: usize,
    edges: Vec<(usize, usize)>,
    capacity: Vec<u64>,
    k: usize,
    adj: Vec<Vec<usize>>,
}

impl CdsInstance {
    /// Edges are stored with `u < v`, sorted. Requires `1 ≤ c(u) ≤ deg(u)`.
    pub fn new(n: usize, edges: Vec<(usize, usize)>, capacity: Vec<u64>, k: usize) -> Result<Self> {
        if capacity.len() != n {
            return Err(Error::Semantic(format!("{} capacities for {n} vertices", capacity.len())));
        }
        let mut set = BTreeSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::Semantic(format!("edge {u} {v} out of range")));
            }
            if u == v {
                return Err(Error::Semantic(format!("self-loop at {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::Semantic(format!("duplicate edge {u} {v}")));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        for u in 0..n {
            if capacity[u] < 1 || capacity[u] > adj[u].len() as u64 {
                return Err(Error::Semantic(format!(
                    "capacity {} of vertex {u} outside 1..={}",
                    capacity[u],
                    adj[u].len()
                )));
            }
        }
        Ok(CdsInstance { n, edges, capacity, k, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn capacity(&self, u: usize) -> u64 {
        self.capacity[u]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Both orientations of every edge, sorted.
    pub fn ordered_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
        out.sort_unstable();
        out
    }

    pub fn budget(&self) -> u64 {
        reduction_budget(self.edges.len(), self.n, self.k)
    }
}

/// Budget of the reduction for a graph with `e` edges and `v` vertices.
pub fn reduction_budget(e: usize, v: usize, k: usize) -> u64 {
    (132 * e + 69 * v + 3 * k + 12) as u64
}

pub fn parse_cds(text: &str) -> Result<CdsInstance> {
    let mut magic = false;
    let mut n: Option<usize> = None;
    let mut k: Option<usize> = None;
    let mut caps: Vec<(usize, u64, usize)> = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        let Some((&key, rest)) = toks.split_first() else { continue };
        if !magic {
            if key != "cds" || rest != ["1"] {
                return Err(parse_err(line, "expected header `cds 1`"));
            }
            magic = true;
            continue;
        }
        match (key, rest.len()) {
            ("n", 1) if n.is_none() => n = Some(parse_num(rest[0], line, "vertex count")?),
            ("k", 1) if k.is_none() => k = Some(parse_num(rest[0], line, "k")?),
            ("cap", 2) => caps.push((parse_num(rest[0], line, "vertex id")?, parse_num(rest[1], line, "capacity")?, line)),
            ("edge", 2) => edges.push((parse_num(rest[0], line, "vertex id")?, parse_num(rest[1], line, "vertex id")?)),
            ("n" | "k", 1) => return Err(parse_err(line, format!("duplicate `{key}` line"))),
            ("n" | "k" | "cap" | "edge", _) => return Err(parse_err(line, format!("wrong arity for `{key}`"))),
            (other, _) => return Err(parse_err(line, format!("unknown keyword `{other}`"))),
        }
    }
    if !magic {
        return Err(parse_err(1, "empty input"));
    }
    let n = n.ok_or_else(|| parse_err(0, "missing `n` line"))?;
    let k = k.ok_or_else(|| parse_err(0, "missing `k` line"))?;
    let mut capacity = vec![None; n];
    for (v, c, line) in caps {
        let slot = capacity.get_mut(v).ok_or_else(|| parse_err(line, format!("vertex {v} out of range")))?;
        if slot.replace(c).is_some() {
            return Err(parse_err(line, format!("duplicate capacity for {v}")));
        }
    }
    let capacity = capacity
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| parse_err(0, format!("missing capacity for {v}"))))
        .collect::<Result<Vec<u64>>>()?;
    CdsInstance::new(n, edges, capacity, k)
}

pub fn serialize_cds(cds: &CdsInstance) -> String {
    let mut out = format!("cds 1\nn {}\n", cds.n);
    for (v, c) in cds.capacity.iter().enumerate() {
        let _ = writeln!(out, "cap {v} {c}");
    }
    for (u, v) in &cds.edges {
        let _ = writeln!(out, "edge {u} {v}");
    }
    let _ = writeln!(out, "k {}", cds.k);
    out
}

/// A dominating set with its domination mapping: `dominator[x]` is the
/// vertex of `set` dominating `x`, `None` exactly for members of `set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdsWitness {
    pub set: Vec<usize>,
    pub dominator: Vec<Option<usize>>,
}

pub fn check_cds_witness(cds: &CdsInstance, w: &CdsWitness) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidCdsWitness(m));
    if w.dominator.len() != cds.n {
        return bad(format!("mapping covers {} of {} vertices", w.dominator.len(), cds.n));
    }
    let set: BTreeSet<usize> = w.set.iter().copied().collect();
    if set.len() != w.set.len() || set.iter().any(|&s| s >= cds.n) {
        return bad("set has repeated or unknown vertices".into());
    }
    if set.len() > cds.k {
        return bad(format!("{} vertices chosen, k = {}", set.len(), cds.k));
    }
    let mut load = vec![0u64; cds.n];
    for (x, d) in w.dominator.iter().enumerate() {
        match (*d, set.contains(&x)) {
            (None, true) => {}
            (Some(_), true) => return bad(format!("chosen vertex {x} has a dominator")),
            (None, false) => return bad(format!("vertex {x} is not dominated")),
            (Some(s), false) => {
                if !set.contains(&s) || !cds.adjacent(s, x) {
                    return bad(format!("{s} cannot dominate {x}"));
                }
                load[s] += 1;
            }
        }
    }
    if let Some(s) = (0..cds.n).find(|&s| load[s] > cds.capacity[s]) {
        return bad(format!("{s} dominates {} vertices, capacity {}", load[s], cds.capacity[s]));
    }
    Ok(())
}

/// Assigns every vertex outside `set` to an adjacent member without
/// exceeding capacities; capacitated bipartite matching by augmenting paths.
fn domination_mapping(cds: &CdsInstance, set: &[usize]) -> Option<Vec<Option<usize>>> {
    let chosen: Vec<bool> = (0..cds.n).map(|v| set.contains(&v)).collect();
    let mut dom: Vec<Option<usize>> = vec![None; cds.n];
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); cds.n];

    fn augment(
        cds: &CdsInstance,
        chosen: &[bool],
        x: usize,
        seen: &mut [bool],
        dom: &mut [Option<usize>],
        assigned: &mut [Vec<usize>],
    ) -> bool {
        for &s in cds.neighbors(x) {
            if !chosen[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            if (assigned[s].len() as u64) < cds.capacity[s] {
                assigned[s].push(x);
                dom[x] = Some(s);
                return true;
            }
            for i in 0..assigned[s].len() {
                let y = assigned[s][i];
                if augment(cds, chosen, y, seen, dom, assigned) {
                    assigned[s][i] = x;
                    dom[x] = Some(s);
                    return true;
                }
            }
        }
        false
    }

    for x in (0..cds.n).filter(|&x| !chosen[x]) {
        let mut seen = vec![false; cds.n];
        if !augment(cds, &chosen, x, &mut seen, &mut dom, &mut assigned) {
            return None;
        }
    }
    Some(dom)
}

pub const MAX_BRUTE_FORCE_VERTICES: usize = 20;

/// Tries every set of at most `k` vertices, smallest first.
pub fn cds_brute_force(cds: &CdsInstance) -> Result<Option<CdsWitness>> {
    if cds.n > MAX_BRUTE_FORCE_VERTICES {
        return Err(Error::TooLarge(format!("{} vertices for exhaustive search", cds.n)));
    }
    let mut masks: Vec<u32> = (0..1u32 << cds.n).filter(|m| m.count_ones() as usize <= cds.k).collect();
    masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
    for m in masks {
        let set: Vec<usize> = (0..cds.n).filter(|&v| m >> v & 1 == 1).collect();
        if let Some(dominator) = domination_mapping(cds, &set) {
            return Ok(Some(CdsWitness { set, dominator }));
        }
    }
    Ok(None)
}

/// Global ids of one placed fragment: `map[local]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub map: Vec<Vertex>,
}

impl Placement {
    pub fn at(&self, local: Vertex) -> Vertex {
        self.map[local]
    }

    fn path(&self, g: &GadgetFragment, name: &str) -> Vec<Vertex> {
        g.path(name).unwrap().iter().map(|&v| self.map[v]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdsReduction {
    pub instance: Instance,
    pub labels: Vec<String>,
    pub selection: Placement,
    pub auxiliary: Placement,
    pub x: Vertex,
    pub x1: Vertex,
    pub x2: Vertex,
    pub x3: Vertex,
    pub z: Vec<Vertex>,
    pub c: Vec<Vertex>,
    pub d: Vec<Vertex>,
    /// Cover gadget of each vertex.
    pub vertex_gadgets: Vec<Placement>,
    /// Cover gadget of each ordered edge, keyed as in `ordered_edges`.
    pub edge_gadgets: Vec<((usize, usize), Placement)>,
    pub terminals: usize,
}

impl CdsReduction {
    pub fn gadget_count(&self) -> usize {
        self.vertex_gadgets.len() + self.edge_gadgets.len()
    }

    fn edge_gadget(&self, u: usize, v: usize) -> &Placement {
        let i = self.edge_gadgets.binary_search_by_key(&(u, v), |e| e.0).expect("edge gadget exists");
        &self.edge_gadgets[i].1
    }
}

struct Builder {
    labels: Vec<String>,
    arcs: Vec<Arc>,
    terminals: Vec<Vertex>,
}

impl Builder {
    fn vertex(&mut self, label: String, terminal: bool) -> Vertex {
        self.labels.push(label);
        let v = self.labels.len() - 1;
        if terminal {
            self.terminals.push(v);
        }
        v
    }

    /// Copies `g` in with fresh ids, except `shared` locals which map to
    /// existing vertices.
    fn place(&mut self, g: &GadgetFragment, prefix: &str, shared: &[(Vertex, Vertex)]) -> Placement {
        let map: Vec<Vertex> = (0..g.n())
            .map(|l| match shared.iter().find(|s| s.0 == l) {
                Some(&(_, v)) => v,
                None => self.vertex(format!("{prefix}.{}", g.labels[l]), g.is_terminal(l)),
            })
            .collect();
        for a in &g.arcs {
            self.arcs.push(Arc::new(map[a.tail], map[a.head], a.weight, a.capacity));
        }
        Placement { map }
    }

    fn arc(&mut self, t: Vertex, h: Vertex) {
        self.arcs.push(Arc::new(t, h, 1, Capacity::Unbounded));
    }
}

pub fn gen_cds_reduction(cds: &CdsInstance) -> CdsReduction {
    let n = cds.n;
    let oe = cds.ordered_edges();
    let force_s = gen_force_gadget(cds.k + 1);
    let force_a = gen_force_gadget(oe.len() + n + 1);
    let cover = gen_cover_gadget();
    let (u_in, u_out) = (force_s.port("u_in").unwrap(), force_s.port("u_out").unwrap());
    let (s_in, t_out) = (cover.port("s_in").unwrap(), cover.port("t_out").unwrap());
    let (x_in, y_out) = (cover.port("x_in").unwrap(), cover.port("y_out").unwrap());
    let z_io = cover.port("z_io").unwrap();

    let mut b = Builder { labels: Vec::new(), arcs: Vec::new(), terminals: Vec::new() };
    let selection = b.place(&force_s, "S", &[]);
    let auxiliary = b.place(&force_a, "A", &[]);
    let x = b.vertex("x".into(), false);
    let x1 = b.vertex("x1".into(), true);
    let x2 = b.vertex("x2".into(), true);
    let x3 = b.vertex("x3".into(), false);
    let (mut z, mut c, mut d) = (Vec::new(), Vec::new(), Vec::new());
    for u in 0..n {
        z.push(b.vertex(format!("z[{u}]"), true));
        c.push(b.vertex(format!("c[{u}]"), false));
        d.push(b.vertex(format!("d[{u}]"), false));
    }
    let (s_in_s, s_out_s) = (selection.at(u_in), selection.at(u_out));
    let (a_in, a_out) = (auxiliary.at(u_in), auxiliary.at(u_out));
    b.arc(x, a_in);
    b.arc(a_out, x2);
    b.arc(x2, x3);
    b.arc(x3, s_in_s);
    b.arc(s_out_s, x1);
    b.arc(x1, x);

    let mut vertex_gadgets = Vec::new();
    for u in 0..n {
        let e = b.place(&cover, &format!("E[{u}]"), &[(z_io, z[u])]);
        b.arc(s_out_s, e.at(x_in));
        b.arc(e.at(y_out), c[u]);
        b.arcs.push(Arc::new(c[u], d[u], 1, Capacity::Finite(cds.capacity[u])));
        b.arc(c[u], s_in_s);
        b.arc(a_out, e.at(s_in));
        b.arc(e.at(t_out), x);
        vertex_gadgets.push(e);
    }
    let mut edge_gadgets = Vec::new();
    for &(u, v) in &oe {
        let e = b.place(&cover, &format!("E[{u},{v}]"), &[(z_io, z[v])]);
        b.arc(d[u], e.at(x_in));
        b.arc(e.at(y_out), c[u]);
        b.arc(a_out, e.at(s_in));
        b.arc(e.at(t_out), x);
        edge_gadgets.push(((u, v), e));
    }
    let terminals = b.terminals.len();
    let instance = Instance::new(b.labels.len(), b.arcs, b.terminals, Some(cds.budget()), false)
        .expect("reduction output is well formed");
    CdsReduction {
        instance,
        labels: b.labels,
        selection,
        auxiliary,
        x,
        x1,
        x2,
        x3,
        z,
        c,
        d,
        vertex_gadgets,
        edge_gadgets,
        terminals,
    }
}

/// The closed walk of cost exactly the budget that a dominating set of size
/// at most `k` induces. A set smaller than `k` is first grown by promoting
/// dominated vertices, since each selection terminal needs its own pass.
pub fn build_witness_walk(cds: &CdsInstance, red: &CdsReduction, w: &CdsWitness) -> Result<ClosedWalk> {
    check_cds_witness(cds, w)?;
    let mut set = w.set.clone();
    let mut dominator = w.dominator.clone();
    while set.len() < cds.k {
        let Some(v) = (0..cds.n).find(|&v| dominator[v].is_some()) else {
            return Err(Error::InvalidCdsWitness(format!("k = {} exceeds the vertex count", cds.k)));
        };
        dominator[v] = None;
        set.push(v);
    }
    set.sort_unstable();

    let force = gen_force_gadget(1);
    let (u_in, u_out, mid) = (force.port("u_in").unwrap(), force.port("u_out").unwrap(), 2);
    let cover = gen_cover_gadget();
    let sel = &red.selection;
    let aux = &red.auxiliary;
    // the i-th pass through a force gadget uses terminal v_{i+1}
    let pass = |p: &Placement, i: usize| [p.at(3 + i), p.at(mid), p.at(u_out)];

    let mut seq = vec![sel.at(u_in)];
    let mut on_p = BTreeSet::new();
    for (j, &s) in set.iter().enumerate() {
        seq.extend(pass(sel, j));
        seq.extend(red.vertex_gadgets[s].path(&cover, "P"));
        seq.push(red.c[s]);
        on_p.insert((s, None));
        for x in (0..cds.n).filter(|&x| dominator[x] == Some(s)) {
            seq.push(red.d[s]);
            seq.extend(red.edge_gadget(s, x).path(&cover, "P"));
            seq.push(red.c[s]);
            on_p.insert((s, Some(x)));
        }
        seq.push(sel.at(u_in));
    }
    seq.extend(pass(sel, set.len()));
    seq.extend([red.x1, red.x, aux.at(u_in)]);
    let gadgets = (0..cds.n)
        .map(|u| ((u, None), &red.vertex_gadgets[u]))
        .chain(red.edge_gadgets.iter().map(|((u, v), p)| ((*u, Some(*v)), p)));
    let mut i = 0;
    for (key, p) in gadgets {
        seq.extend(pass(aux, i));
        seq.extend(p.path(&cover, if on_p.contains(&key) { "R2" } else { "R1" }));
        seq.extend([red.x, aux.at(u_in)]);
        i += 1;
    }
    seq.extend(pass(aux, i));
    seq.extend([red.x2, red.x3, sel.at(u_in)]);
    vertices_to_walk(&red.instance, &seq)
}
