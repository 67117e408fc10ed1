//! All-pairs shortest paths ignoring capacities (the metric closure).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::instance::{ArcId, Instance, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<Option<u64>>,
    // Last arc of a shortest source -> target path.
    pred: Vec<Option<ArcId>>,
    tail_of: Vec<Vertex>,
}

impl DistanceMatrix {
    pub fn dist(&self, u: Vertex, v: Vertex) -> Option<u64> {
        self.dist[u * self.n + v]
    }

    /// Arcs of a shortest `u -> v` path; empty when `u == v`, `None` when
    /// unreachable.
    pub fn path(&self, u: Vertex, v: Vertex) -> Option<Vec<ArcId>> {
        self.dist(u, v)?;
        let mut arcs = Vec::new();
        let mut at = v;
        while at != u {
            let a = self.pred[u * self.n + at]?;
            arcs.push(a);
            at = self.tail_of[a];
        }
        arcs.reverse();
        Some(arcs)
    }
}

/// Dijkstra from every source.
pub fn metric_closure(inst: &Instance) -> DistanceMatrix {
    let n = inst.n();
    let mut dist = vec![None; n * n];
    let mut pred = vec![None; n * n];
    for s in 0..n {
        let row = s * n;
        let mut heap = BinaryHeap::new();
        dist[row + s] = Some(0);
        heap.push(Reverse((0u64, s)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[row + v] != Some(d) {
                continue;
            }
            for &a in inst.out_arcs(v) {
                let arc = inst.arc(a);
                let nd = d + arc.weight;
                if dist[row + arc.head].is_none_or(|old| nd < old) {
                    dist[row + arc.head] = Some(nd);
                    pred[row + arc.head] = Some(a);
                    heap.push(Reverse((nd, arc.head)));
                }
            }
        }
    }
    let tail_of = inst.arcs().iter().map(|a| a.tail).collect();
    DistanceMatrix { n, dist, pred, tail_of }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Arc, Capacity};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn floyd_warshall(inst: &Instance) -> Vec<Vec<Option<u64>>> {
        let n = inst.n();
        let mut d = vec![vec![None; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = Some(0);
        }
        for a in inst.arcs() {
            let cur = &mut d[a.tail][a.head];
            if cur.is_none_or(|c| a.weight < c) {
                *cur = Some(a.weight);
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                        if d[i][j].is_none_or(|c| x + y < c) {
                            d[i][j] = Some(x + y);
                        }
                    }
                }
            }
        }
        d
    }

    #[test]
    fn forced_path_in_directed_triangle() {
        let arcs = (0..3)
            .map(|i| Arc::new(i, (i + 1) % 3, 1, Capacity::Unbounded))
            .collect();
        let inst = Instance::new(3, arcs, vec![0, 1], None, false).unwrap();
        let dm = metric_closure(&inst);
        assert_eq!(dm.dist(1, 0), Some(2));
        assert_eq!(dm.dist(0, 0), Some(0));
        assert_eq!(dm.path(1, 0).unwrap().len(), 2);
    }

    #[test]
    fn matches_floyd_warshall_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..40 {
            let n = 6;
            let mut arcs = Vec::new();
            for t in 0..n {
                for h in 0..n {
                    if t != h && rng.gen_bool(0.35) {
                        arcs.push(Arc::new(t, h, rng.gen_range(1..10), Capacity::Unbounded));
                    }
                }
            }
            let inst = Instance::new(n, arcs, vec![0, 1], None, false).unwrap();
            let dm = metric_closure(&inst);
            let fw = floyd_warshall(&inst);
            for u in 0..n {
                for v in 0..n {
                    assert_eq!(dm.dist(u, v), fw[u][v]);
                    if let Some(p) = dm.path(u, v) {
                        let w: u64 = p.iter().map(|&a| inst.arc(a).weight).sum();
                        assert_eq!(Some(w), fw[u][v]);
                    }
                }
            }
        }
    }
}
