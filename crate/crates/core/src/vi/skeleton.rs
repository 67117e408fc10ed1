//! Guesses for how the optimal walk moves between modulator vertices.
//!
//! `H0` holds the arcs inside `M` the walk uses directly and `H1` the
//! endpoint pairs of its segments through components. Their union has one
//! strongly connected part containing the waypoints of `M`; everything else
//! is isolated.

use std::collections::BTreeSet;

use crate::instance::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Skeleton {
    pub h0: BTreeSet<(Vertex, Vertex)>,
    pub h1: BTreeSet<(Vertex, Vertex)>,
    /// Non-isolated vertices of the union; for an arcless union, the
    /// waypoints of `M` (at most one).
    pub core: Vec<Vertex>,
}

impl Skeleton {
    pub fn union(&self) -> BTreeSet<(Vertex, Vertex)> {
        self.h0.union(&self.h1).copied().collect()
    }
}

/// Vertices touched by `arcs`, if they form one strongly connected part.
fn single_scc(arcs: &BTreeSet<(Vertex, Vertex)>) -> Option<Vec<Vertex>> {
    let vs: Vec<Vertex> = arcs.iter().flat_map(|&(u, v)| [u, v]).collect::<BTreeSet<_>>().into_iter().collect();
    let reach = |forward: bool| {
        let mut seen = BTreeSet::from([vs[0]]);
        let mut stack = vec![vs[0]];
        while let Some(x) = stack.pop() {
            for &(u, v) in arcs {
                let (a, b) = if forward { (u, v) } else { (v, u) };
                if a == x && seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        seen.len() == vs.len()
    };
    (reach(true) && reach(false)).then_some(vs)
}

/// Skeletons whose `H0` arcs come from `allowed0` and `H1` arcs from
/// `allowed1`, in a fixed order.
pub fn enumerate_skeletons_within(
    waypoints_in_m: &[Vertex],
    allowed0: &[(Vertex, Vertex)],
    allowed1: &[(Vertex, Vertex)],
) -> Vec<Skeleton> {
    let (a, b) = (allowed0.len(), allowed1.len());
    assert!(a + b < 40, "too many candidate skeleton arcs");
    let mut out = Vec::new();
    for m0 in 0u64..1 << a {
        let h0: BTreeSet<_> = (0..a).filter(|i| m0 >> i & 1 == 1).map(|i| allowed0[i]).collect();
        for m1 in 0u64..1 << b {
            let h1: BTreeSet<_> = (0..b).filter(|i| m1 >> i & 1 == 1).map(|i| allowed1[i]).collect();
            let union: BTreeSet<(Vertex, Vertex)> = h0.union(&h1).copied().collect();
            let core = if union.is_empty() {
                if waypoints_in_m.len() > 1 {
                    continue;
                }
                waypoints_in_m.to_vec()
            } else {
                match single_scc(&union) {
                    Some(vs) if waypoints_in_m.iter().all(|w| vs.contains(w)) => vs,
                    _ => continue,
                }
            };
            out.push(Skeleton { h0: h0.clone(), h1, core });
        }
    }
    out
}

/// All skeletons on `m`.
pub fn enumerate_skeletons(m: &[Vertex], waypoints_in_m: &[Vertex]) -> Vec<Skeleton> {
    let pairs: Vec<(Vertex, Vertex)> =
        m.iter().flat_map(|&u| m.iter().filter(move |&&v| v != u).map(move |&v| (u, v))).collect();
    enumerate_skeletons_within(waypoints_in_m, &pairs, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent filter over all pairs of digraphs on two vertices.
    fn brute_two(w: &[Vertex]) -> usize {
        let mut count = 0;
        for m0 in 0..4u32 {
            for m1 in 0..4u32 {
                let u = m0 | m1;
                let ok = match u {
                    0 => w.len() <= 1,
                    3 => true,
                    _ => false,
                };
                count += ok as usize;
            }
        }
        count
    }

    #[test]
    fn one_vertex() {
        let s = enumerate_skeletons(&[4], &[4]);
        assert_eq!(s.len(), 1);
        assert!(s[0].h0.is_empty() && s[0].h1.is_empty());
    }

    #[test]
    fn two_vertices() {
        let none = enumerate_skeletons(&[0, 1], &[]);
        assert_eq!(none.len(), brute_two(&[]));
        assert!(none.iter().any(|s| s.union().is_empty()));
        assert!(none.iter().all(|s| s.union().len() != 1));
        let both = enumerate_skeletons(&[0, 1], &[0, 1]);
        assert_eq!(both.len(), 9);
        assert_eq!(both.len(), brute_two(&[0, 1]));
    }

    #[test]
    fn three_vertices_isolated_rest() {
        for s in enumerate_skeletons(&[0, 1, 2], &[0]) {
            let u = s.union();
            if u.is_empty() {
                assert_eq!(s.core, vec![0]);
            } else {
                assert!(s.core.contains(&0));
                assert!(u.iter().all(|&(a, b)| s.core.contains(&a) && s.core.contains(&b)));
            }
        }
    }
}
