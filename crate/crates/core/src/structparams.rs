//! Structural parameters of the underlying undirected graph: feedback edge
//! sets, vertex-integrity modulators and (nice) tree decompositions.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::instance::{Instance, Vertex};
use crate::walk::Dsu;

/// Simple undirected graph; arcs in either direction between `u` and `v`
/// become the single edge `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnderlyingGraph {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex)>,
    pub adj: Vec<Vec<Vertex>>,
}

impl UnderlyingGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        let set: BTreeSet<(Vertex, Vertex)> = edges
            .into_iter()
            .filter(|&(u, v)| u != v)
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        let edges: Vec<_> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        UnderlyingGraph { n, edges, adj }
    }

    pub fn of(inst: &Instance) -> Self {
        Self::new(inst.n(), inst.arcs().iter().map(|a| (a.tail, a.head)))
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn component_count(&self) -> usize {
        let mut dsu = Dsu::new(self.n);
        let mut c = self.n;
        for &(u, v) in &self.edges {
            if dsu.union(u, v) {
                c -= 1;
            }
        }
        c
    }

    /// Connected components of the graph restricted to `alive` vertices,
    /// each sorted, in order of smallest vertex.
    pub fn components_within(&self, alive: &[bool]) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if !alive[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &u in &self.adj[v] {
                    if alive[u] && !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

/// Complement of a BFS spanning forest; always of minimum size
/// `|E| - n + #components`.
pub fn feedback_edge_set(g: &UnderlyingGraph) -> Vec<(Vertex, Vertex)> {
    let mut dsu = Dsu::new(g.n);
    g.edges.iter().copied().filter(|&(u, v)| !dsu.union(u, v)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulator {
    pub m: Vec<Vertex>,
    pub k: usize,
    pub components: Vec<Vec<Vertex>>,
}

impl Modulator {
    /// Builds the modulator for a given deletion set, computing the
    /// components of the rest.
    pub fn from_set(g: &UnderlyingGraph, mut m: Vec<Vertex>, k: usize) -> Modulator {
        m.sort_unstable();
        m.dedup();
        let mut alive = vec![true; g.n];
        for &v in &m {
            alive[v] = false;
        }
        Modulator { components: g.components_within(&alive), m, k }
    }

    pub fn is_valid(&self) -> bool {
        self.m.len() <= self.k && self.components.iter().all(|c| c.len() <= self.k)
    }
}

/// A set of `limit` vertices forming a connected subgraph of `G - deleted`,
/// if some component has at least that many vertices.
fn connected_subset(g: &UnderlyingGraph, alive: &[bool], limit: usize) -> Option<Vec<Vertex>> {
    for comp in g.components_within(alive) {
        if comp.len() < limit {
            continue;
        }
        let mut seen = vec![false; g.n];
        let mut order = Vec::with_capacity(limit);
        let mut queue = VecDeque::from([comp[0]]);
        seen[comp[0]] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            if order.len() == limit {
                return Some(order);
            }
            for &u in &g.adj[v] {
                if alive[u] && !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    None
}

fn branch_modulator(
    g: &UnderlyingGraph,
    alive: &mut Vec<bool>,
    deleted: &mut Vec<Vertex>,
    budget: usize,
    k: usize,
) -> bool {
    let Some(big) = connected_subset(g, alive, k + 1) else { return true };
    if deleted.len() == budget {
        return false;
    }
    // Any k-modulator must delete a vertex of every connected (k+1)-set.
    for v in big {
        alive[v] = false;
        deleted.push(v);
        if branch_modulator(g, alive, deleted, budget, k) {
            return true;
        }
        deleted.pop();
        alive[v] = true;
    }
    false
}

/// A smallest deletion set `M` with `|M| <= k` leaving components of at most
/// `k` vertices, or `None` if no such set exists.
pub fn vertex_integrity_modulator(g: &UnderlyingGraph, k: usize) -> Option<Modulator> {
    if k == 0 {
        return (g.n == 0).then(|| Modulator { m: Vec::new(), k, components: Vec::new() });
    }
    for budget in 0..=k {
        let mut alive = vec![true; g.n];
        let mut deleted = Vec::new();
        if branch_modulator(g, &mut alive, &mut deleted, budget, k) {
            return Some(Modulator::from_set(g, deleted, k));
        }
    }
    None
}

/// Smallest `k <= limit` admitting a `k`-modulator.
pub fn vertex_integrity(g: &UnderlyingGraph, limit: usize) -> Option<Modulator> {
    (1..=limit).find_map(|k| vertex_integrity_modulator(g, k))
}

/// Undirected tree decomposition: bags and tree edges between bag indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<Vertex>>,
    pub tree: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }
}

/// Checks the three tree-decomposition conditions: every vertex and every
/// edge is covered by a bag, and the bags containing any vertex form a
/// connected subtree. Also checks that `tree` is a tree.
pub fn check_tree_decomposition(g: &UnderlyingGraph, td: &TreeDecomposition) -> Result<()> {
    let nb = td.bags.len();
    let bad = |s: String| Err(Error::InvalidDecomposition(s));
    if nb == 0 {
        return if g.n == 0 { Ok(()) } else { bad("no bags".into()) };
    }
    if td.tree.len() != nb - 1 {
        return bad(format!("{} tree edges for {} bags", td.tree.len(), nb));
    }
    let mut dsu = Dsu::new(nb);
    for &(a, b) in &td.tree {
        if a >= nb || b >= nb || !dsu.union(a, b) {
            return bad(format!("tree edge ({a}, {b}) is invalid or closes a cycle"));
        }
    }
    let contains: Vec<BTreeSet<Vertex>> =
        td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    for v in 0..g.n {
        let holders: Vec<usize> = (0..nb).filter(|&i| contains[i].contains(&v)).collect();
        if holders.is_empty() {
            return bad(format!("vertex {v} is in no bag"));
        }
        let mut d = Dsu::new(nb);
        let mut parts = holders.len();
        for &(a, b) in &td.tree {
            if contains[a].contains(&v) && contains[b].contains(&v) && d.union(a, b) {
                parts -= 1;
            }
        }
        if parts != 1 {
            return bad(format!("bags containing vertex {v} are not connected"));
        }
    }
    for &(u, v) in &g.edges {
        if !contains.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return bad(format!("edge {{{u}, {v}}} is in no bag"));
        }
    }
    Ok(())
}

/// Tree decomposition induced by eliminating vertices in `order`.
pub fn decomposition_from_order(g: &UnderlyingGraph, order: &[Vertex]) -> TreeDecomposition {
    let n = g.n;
    if n == 0 {
        return TreeDecomposition { bags: Vec::new(), tree: Vec::new() };
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut nbrs: Vec<BTreeSet<Vertex>> =
        g.adj.iter().map(|a| a.iter().copied().collect()).collect();
    let mut bags = vec![Vec::new(); n];
    let mut parent = vec![None; n];
    for &v in order {
        let later: Vec<Vertex> = nbrs[v].iter().copied().filter(|&u| pos[u] > pos[v]).collect();
        for (i, &a) in later.iter().enumerate() {
            for &b in &later[i + 1..] {
                nbrs[a].insert(b);
                nbrs[b].insert(a);
            }
        }
        let mut bag = later.clone();
        bag.push(v);
        bag.sort_unstable();
        bags[pos[v]] = bag;
        parent[pos[v]] = later.iter().map(|&u| pos[u]).min();
    }
    let mut tree = Vec::with_capacity(n - 1);
    let mut roots = Vec::new();
    for (i, p) in parent.iter().enumerate() {
        match p {
            Some(p) => tree.push((i, *p)),
            None => roots.push(i),
        }
    }
    // Disconnected pieces share no vertices, so chaining their roots is safe.
    for w in roots.windows(2) {
        tree.push((w[0], w[1]));
    }
    TreeDecomposition { bags, tree }
}

/// Exact minimum-width elimination ordering by DP over vertex subsets.
fn exact_order(g: &UnderlyingGraph) -> Vec<Vertex> {
    let n = g.n;
    let adj: Vec<u32> = g
        .adj
        .iter()
        .map(|a| a.iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    // q(s, v): vertices outside s + v reachable from v through s.
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut frontier = adj[v];
        let mut out = 0u32;
        while frontier & !seen != 0 {
            let fresh = frontier & !seen;
            seen |= fresh;
            out |= fresh & !s;
            let inside = fresh & s;
            let mut next = 0u32;
            let mut bits = inside;
            while bits != 0 {
                let u = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= adj[u];
            }
            frontier = next;
        }
        out & !(1 << v)
    };
    let full = 1usize << n;
    let mut tw = vec![u8::MAX; full];
    let mut choice = vec![0u8; full];
    tw[0] = 0;
    for s in 1..full {
        let mut bits = s as u32;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            let w = tw[rest].max(q(rest as u32, v).count_ones() as u8);
            if w < tw[s] {
                tw[s] = w;
                choice[s] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full - 1;
    while s != 0 {
        let v = choice[s] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    order
}

/// Greedy min-fill elimination ordering (ties by degree, then id).
fn min_fill_order(g: &UnderlyingGraph) -> Vec<Vertex> {
    let n = g.n;
    let mut nbrs: Vec<BTreeSet<Vertex>> =
        g.adj.iter().map(|a| a.iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| {
                let ns: Vec<_> = nbrs[v].iter().copied().collect();
                let mut fill = 0;
                for (i, &a) in ns.iter().enumerate() {
                    for &b in &ns[i + 1..] {
                        if !nbrs[a].contains(&b) {
                            fill += 1;
                        }
                    }
                }
                (fill, ns.len(), v)
            })
            .expect("a live vertex remains");
        let ns: Vec<_> = nbrs[v].iter().copied().collect();
        for (i, &a) in ns.iter().enumerate() {
            nbrs[a].remove(&v);
            for &b in &ns[i + 1..] {
                nbrs[a].insert(b);
                nbrs[b].insert(a);
            }
        }
        if let Some(&last) = ns.last() {
            nbrs[last].remove(&v);
        }
        nbrs[v].clear();
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Largest vertex count for which the exact subset DP is used.
pub const EXACT_TREEWIDTH_MAX_N: usize = 20;

/// Minimum-width decomposition for `n <= 20`, min-fill heuristic otherwise.
/// The flag tells whether the width is known to be optimal.
pub fn exact_tree_decomposition(g: &UnderlyingGraph) -> (TreeDecomposition, bool) {
    if g.n <= EXACT_TREEWIDTH_MAX_N {
        (decomposition_from_order(g, &exact_order(g)), true)
    } else {
        (decomposition_from_order(g, &min_fill_order(g)), false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    IntroduceVertex(Vertex),
    IntroduceEdge(Vertex, Vertex),
    Forget(Vertex),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    /// Sorted bag.
    pub bag: Vec<Vertex>,
    pub kind: NodeKind,
    pub children: Vec<usize>,
}

/// Rooted nice tree decomposition. Node ids are in post-order: every child
/// has a smaller id than its parent and the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
    pub anchor: Vertex,
}

impl NiceTreeDecomposition {
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }
}

struct NiceBuilder {
    nodes: Vec<NiceNode>,
}

impl NiceBuilder {
    fn push(&mut self, bag: Vec<Vertex>, kind: NodeKind, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { bag, kind, children });
        self.nodes.len() - 1
    }

    /// Forgets and introduces vertices one at a time to turn the bag of node
    /// `x` into `target`.
    fn morph(&mut self, mut x: usize, target: &[Vertex]) -> usize {
        let current = self.nodes[x].bag.clone();
        for &v in current.iter().filter(|v| !target.contains(v)) {
            let bag: Vec<Vertex> = self.nodes[x].bag.iter().copied().filter(|&u| u != v).collect();
            x = self.push(bag, NodeKind::Forget(v), vec![x]);
        }
        for &v in target.iter().filter(|v| !current.contains(v)) {
            let mut bag = self.nodes[x].bag.clone();
            bag.push(v);
            bag.sort_unstable();
            x = self.push(bag, NodeKind::IntroduceVertex(v), vec![x]);
        }
        x
    }
}

/// Converts a tree decomposition into a nice one rooted so that `anchor` is
/// never forgotten: the root bag is `{anchor}`. Every underlying edge gets
/// exactly one introduce-edge node, placed just below the forget node of the
/// endpoint whose occurrences end lower in the tree.
pub fn make_nice(
    g: &UnderlyingGraph,
    td: &TreeDecomposition,
    anchor: Vertex,
) -> Result<NiceTreeDecomposition> {
    check_tree_decomposition(g, td)?;
    if anchor >= g.n {
        return Err(Error::InvalidDecomposition(format!("anchor {anchor} out of range")));
    }
    let nb = td.bags.len();
    let mut tadj = vec![Vec::new(); nb];
    for &(a, b) in &td.tree {
        tadj[a].push(b);
        tadj[b].push(a);
    }
    let root_bag = (0..nb)
        .find(|&i| td.bags[i].contains(&anchor))
        .expect("checked: anchor is in some bag");
    // Iterative post-order over the raw tree.
    let mut parent = vec![usize::MAX; nb];
    let mut order = Vec::with_capacity(nb);
    let mut stack = vec![root_bag];
    parent[root_bag] = root_bag;
    while let Some(t) = stack.pop() {
        order.push(t);
        for &c in &tadj[t] {
            if parent[c] == usize::MAX {
                parent[c] = t;
                stack.push(c);
            }
        }
    }
    let mut b = NiceBuilder { nodes: Vec::new() };
    let mut built = vec![usize::MAX; nb];
    for &t in order.iter().rev() {
        let mut bag = td.bags[t].clone();
        bag.sort_unstable();
        bag.dedup();
        let kids: Vec<usize> = tadj[t].iter().copied().filter(|&c| c != parent[t]).collect();
        let mut subs: Vec<usize> = kids.iter().map(|&c| b.morph(built[c], &bag)).collect();
        if subs.is_empty() {
            let leaf = b.push(Vec::new(), NodeKind::Leaf, Vec::new());
            subs.push(b.morph(leaf, &bag));
        }
        while subs.len() > 1 {
            let right = subs.pop().unwrap();
            let left = subs.pop().unwrap();
            let j = b.push(bag.clone(), NodeKind::Join, vec![left, right]);
            subs.push(j);
        }
        built[t] = subs[0];
    }
    let top = b.morph(built[root_bag], &[anchor]);

    // Place introduce-edge nodes. Depth decides which forget node is lower.
    let mut nodes = b.nodes;
    let mut depth = vec![0usize; nodes.len()];
    for x in (0..nodes.len()).rev() {
        for &c in &nodes[x].children.clone() {
            depth[c] = depth[x] + 1;
        }
    }
    let mut forget_of = vec![usize::MAX; g.n];
    for (x, node) in nodes.iter().enumerate() {
        if let NodeKind::Forget(v) = node.kind {
            forget_of[v] = x;
        }
    }
    let mut below: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); nodes.len()];
    for &(u, v) in &g.edges {
        let fu = forget_of[u];
        let fv = forget_of[v];
        let at = match (fu == usize::MAX, fv == usize::MAX) {
            (true, true) => unreachable!("only the anchor is never forgotten"),
            (true, false) => fv,
            (false, true) => fu,
            (false, false) => {
                if depth[fu] >= depth[fv] {
                    fu
                } else {
                    fv
                }
            }
        };
        below[at].push((u, v));
    }
    // Rebuild with fresh post-order ids, splicing the edge chains.
    let mut out: Vec<NiceNode> = Vec::with_capacity(nodes.len() + g.m());
    let mut new_id = vec![usize::MAX; nodes.len()];
    for x in 0..=top {
        let node = std::mem::replace(
            &mut nodes[x],
            NiceNode { bag: Vec::new(), kind: NodeKind::Leaf, children: Vec::new() },
        );
        let mut children: Vec<usize> = node.children.iter().map(|&c| new_id[c]).collect();
        if !below[x].is_empty() {
            let mut child = children[0];
            let bag = out[child].bag.clone();
            for &(u, v) in &below[x] {
                out.push(NiceNode {
                    bag: bag.clone(),
                    kind: NodeKind::IntroduceEdge(u, v),
                    children: vec![child],
                });
                child = out.len() - 1;
            }
            children[0] = child;
        }
        out.push(NiceNode { bag: node.bag, kind: node.kind, children });
        new_id[x] = out.len() - 1;
    }
    let nice = NiceTreeDecomposition { root: out.len() - 1, nodes: out, anchor };
    check_nice(g, &nice)?;
    Ok(nice)
}

/// Verifies a nice decomposition from scratch: node kinds agree with bags,
/// leaves are empty, the root bag is `{anchor}`, every vertex occurs,
/// occurrence sets are connected, and every edge is introduced exactly once
/// at a node whose bag holds both endpoints.
pub fn check_nice(g: &UnderlyingGraph, nice: &NiceTreeDecomposition) -> Result<()> {
    let bad = |s: String| Err(Error::InvalidDecomposition(s));
    let nodes = &nice.nodes;
    if nodes.is_empty() || nice.root != nodes.len() - 1 {
        return bad("root must be the last node".into());
    }
    if nodes[nice.root].bag != vec![nice.anchor] {
        return bad(format!("root bag is {:?}, expected [{}]", nodes[nice.root].bag, nice.anchor));
    }
    let mut has_parent = vec![false; nodes.len()];
    let mut introduced: Vec<(Vertex, Vertex)> = Vec::new();
    for (x, node) in nodes.iter().enumerate() {
        if node.bag.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("node {x}: bag not sorted/unique"));
        }
        for &c in &node.children {
            if c >= x || has_parent[c] {
                return bad(format!("node {x}: child {c} misordered or shared"));
            }
            has_parent[c] = true;
        }
        let kid = |i: usize| &nodes[node.children[i]].bag;
        let ok = match node.kind {
            NodeKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
            NodeKind::IntroduceVertex(v) => {
                node.children.len() == 1 && {
                    let mut want = kid(0).clone();
                    !want.contains(&v) && {
                        want.push(v);
                        want.sort_unstable();
                        want == node.bag
                    }
                }
            }
            NodeKind::Forget(v) => {
                node.children.len() == 1 && kid(0).contains(&v) && {
                    let want: Vec<_> = kid(0).iter().copied().filter(|&u| u != v).collect();
                    want == node.bag
                }
            }
            NodeKind::IntroduceEdge(u, v) => {
                introduced.push((u.min(v), u.max(v)));
                node.children.len() == 1
                    && kid(0) == &node.bag
                    && node.bag.contains(&u)
                    && node.bag.contains(&v)
                    && g.has_edge(u, v)
            }
            NodeKind::Join => {
                node.children.len() == 2 && kid(0) == &node.bag && kid(1) == &node.bag
            }
        };
        if !ok {
            return bad(format!("node {x}: kind {:?} inconsistent with bags", node.kind));
        }
    }
    if has_parent.iter().filter(|&&p| !p).count() != 1 {
        return bad("decomposition is not a single tree".into());
    }
    introduced.sort_unstable();
    if introduced != g.edges {
        return bad("edges are not introduced exactly once each".into());
    }
    // Occurrence connectivity: in a rooted tree, the nodes holding v are
    // connected iff exactly one of them has a parent not holding v (or is
    // the root).
    let mut parent = vec![usize::MAX; nodes.len()];
    for (x, node) in nodes.iter().enumerate() {
        for &c in &node.children {
            parent[c] = x;
        }
    }
    for v in 0..g.n {
        let tops = (0..nodes.len())
            .filter(|&x| nodes[x].bag.contains(&v))
            .filter(|&x| parent[x] == usize::MAX || !nodes[parent[x]].bag.contains(&v))
            .count();
        if tops != 1 {
            return bad(format!("vertex {v} occurs in {tops} separate subtrees"));
        }
    }
    Ok(())
}

/// Nice decomposition of an instance's underlying graph anchored at `anchor`.
pub fn nice_decomposition(inst: &Instance, anchor: Vertex) -> Result<NiceTreeDecomposition> {
    let g = UnderlyingGraph::of(inst);
    let (td, _) = exact_tree_decomposition(&g);
    make_nice(&g, &td, anchor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> UnderlyingGraph {
        UnderlyingGraph::new(n, (1..n).map(|i| (i - 1, i)))
    }

    fn cycle(n: usize) -> UnderlyingGraph {
        UnderlyingGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    fn complete(n: usize) -> UnderlyingGraph {
        UnderlyingGraph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    fn grid(r: usize, c: usize) -> UnderlyingGraph {
        let id = |i: usize, j: usize| i * c + j;
        let mut e = Vec::new();
        for i in 0..r {
            for j in 0..c {
                if i + 1 < r {
                    e.push((id(i, j), id(i + 1, j)));
                }
                if j + 1 < c {
                    e.push((id(i, j), id(i, j + 1)));
                }
            }
        }
        UnderlyingGraph::new(r * c, e)
    }

    #[test]
    fn antiparallel_arcs_merge() {
        let g = UnderlyingGraph::new(3, [(0, 1), (1, 0), (1, 2)]);
        assert_eq!(g.edges, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn feedback_edge_set_sizes() {
        assert!(feedback_edge_set(&path(6)).is_empty());
        assert_eq!(feedback_edge_set(&cycle(5)).len(), 1);
        assert_eq!(feedback_edge_set(&complete(4)).len(), 3);
        let two = UnderlyingGraph::new(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert_eq!(feedback_edge_set(&two).len(), two.m() - two.n + two.component_count());
    }

    fn brute_force_modulator_exists(g: &UnderlyingGraph, k: usize) -> bool {
        (0u32..(1 << g.n)).any(|s| {
            if s.count_ones() as usize > k {
                return false;
            }
            let alive: Vec<bool> = (0..g.n).map(|v| s & (1 << v) == 0).collect();
            g.components_within(&alive).iter().all(|c| c.len() <= k)
        })
    }

    #[test]
    fn modulators() {
        let edgeless = UnderlyingGraph::new(4, []);
        assert_eq!(vertex_integrity_modulator(&edgeless, 1).unwrap().m, Vec::<usize>::new());
        let star = UnderlyingGraph::new(6, (1..6).map(|i| (0, i)));
        assert_eq!(vertex_integrity_modulator(&star, 1).unwrap().m, vec![0]);
        let p9 = path(9);
        assert!(vertex_integrity_modulator(&p9, 2).is_none());
        let m = vertex_integrity_modulator(&p9, 3).unwrap();
        assert!(m.is_valid());
        assert!(!brute_force_modulator_exists(&p9, 2));
        assert!(brute_force_modulator_exists(&p9, 3));
    }

    #[test]
    fn exact_widths() {
        assert_eq!(exact_tree_decomposition(&path(5)).0.width(), 1);
        assert_eq!(exact_tree_decomposition(&cycle(6)).0.width(), 2);
        assert_eq!(exact_tree_decomposition(&grid(3, 3)).0.width(), 3);
        assert_eq!(exact_tree_decomposition(&complete(5)).0.width(), 4);
        for g in [path(5), cycle(6), grid(3, 3), complete(5)] {
            check_tree_decomposition(&g, &exact_tree_decomposition(&g).0).unwrap();
        }
    }

    #[test]
    fn min_fill_is_valid() {
        let g = grid(5, 5);
        let td = decomposition_from_order(&g, &min_fill_order(&g));
        check_tree_decomposition(&g, &td).unwrap();
        assert!(td.width() >= 5);
    }

    #[test]
    fn nice_triangle_from_single_bag() {
        let g = complete(3);
        let td = TreeDecomposition { bags: vec![vec![0, 1, 2]], tree: vec![] };
        let nice = make_nice(&g, &td, 0).unwrap();
        let count = |f: fn(&NodeKind) -> bool| nice.nodes.iter().filter(|x| f(&x.kind)).count();
        assert_eq!(count(|k| matches!(k, NodeKind::IntroduceVertex(_))), 3);
        assert_eq!(count(|k| matches!(k, NodeKind::IntroduceEdge(..))), 3);
        assert_eq!(nice.nodes[nice.root].bag, vec![0]);
        assert_eq!(nice.width(), 2);
    }

    #[test]
    fn nice_path_introduces_each_edge_once() {
        let g = path(4);
        let td = TreeDecomposition {
            bags: vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            tree: vec![(0, 1), (1, 2)],
        };
        let nice = make_nice(&g, &td, 3).unwrap();
        let edges = nice
            .nodes
            .iter()
            .filter(|x| matches!(x.kind, NodeKind::IntroduceEdge(..)))
            .count();
        assert_eq!(edges, 3);
        assert_eq!(nice.width(), 1);
    }

    #[test]
    fn checker_rejects_broken_decompositions() {
        let g = path(3);
        let td = TreeDecomposition { bags: vec![vec![0, 1], vec![2]], tree: vec![(0, 1)] };
        assert!(check_tree_decomposition(&g, &td).is_err());
        let td = TreeDecomposition {
            bags: vec![vec![0, 1], vec![2], vec![1, 2]],
            tree: vec![(0, 1), (1, 2)],
        };
        assert!(check_tree_decomposition(&g, &td).is_err());
    }
}
