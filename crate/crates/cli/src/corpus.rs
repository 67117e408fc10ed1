//! Benchmark corpora.
//!
//! `exhaustive` holds every strongly connected digraph on 2 to 4 vertices up
//! to isomorphism, with every waypoint set of size at least two. On up to
//! three vertices every assignment of weights in {1, 2} and capacities in
//! {1, inf} is included; on four vertices a few seeded assignments per
//! graph and waypoint set. Instances equal up to relabelling are kept once.
//!
//! `random` holds seeded random instances on 3 to 7 vertices.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use dwrp::format::{parse_instance, serialize_instance};
use dwrp::hardness::{gen_random, RandomParams};
use dwrp::{Arc, Capacity, Error, Instance, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub instance: Instance,
}

/// Seeded label assignments per graph and waypoint set on four vertices.
pub const PATTERNS_N4: usize = 3;
pub const RANDOM_COUNT: usize = 200;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn strongly_connected(n: usize, arcs: &[(usize, usize)]) -> bool {
    let reach = |fwd: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(t, h) in arcs {
                let (a, b) = if fwd { (t, h) } else { (h, t) };
                if a == v && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// One representative arc list per isomorphism class of strongly connected
/// digraphs on `n` vertices, in canonical order.
pub fn strongly_connected_digraphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let arcs: Vec<_> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        if !strongly_connected(n, &arcs) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut a: Vec<_> = arcs.iter().map(|&(t, h)| (p[t], p[h])).collect();
                a.sort_unstable();
                a
            })
            .min()
            .unwrap();
        if seen.insert(canon.clone()) {
            out.push(canon);
        }
    }
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

type Key = (Vec<usize>, Vec<(usize, usize, u64, u64)>);

fn canonical_key(arcs: &[(usize, usize, u64, u64)], ws: &[usize], perms: &[Vec<usize>]) -> Key {
    perms
        .iter()
        .map(|p| {
            let mut w: Vec<_> = ws.iter().map(|&v| p[v]).collect();
            w.sort_unstable();
            let mut a: Vec<_> = arcs.iter().map(|&(t, h, x, c)| (p[t], p[h], x, c)).collect();
            a.sort_unstable();
            (w, a)
        })
        .min()
        .expect("at least one permutation")
}

fn build(n: usize, arcs: &[(usize, usize, u64, u64)], ws: &[usize]) -> Instance {
    let arcs = arcs
        .iter()
        .map(|&(t, h, w, c)| Arc::new(t, h, w, if c == 0 { Capacity::Unbounded } else { Capacity::Finite(c) }))
        .collect();
    Instance::new(n, arcs, ws.to_vec(), None, false).expect("corpus instance is well formed")
}

fn waypoint_sets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() >= 2)
        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
        .collect()
}

pub fn exhaustive_corpus(seed: u64) -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 2..=4 {
        let perms = permutations(n);
        let mut seen = BTreeSet::new();
        for (gi, g) in strongly_connected_digraphs(n).iter().enumerate() {
            let m = g.len();
            let mut labelings: Vec<Vec<(u64, u64)>> = Vec::new();
            if n <= 3 {
                for code in 0u32..1 << (2 * m) {
                    labelings.push(
                        (0..m).map(|i| (1 + (code >> (2 * i) & 1) as u64, (code >> (2 * i + 1) & 1) as u64)).collect(),
                    );
                }
            }
            for ws in waypoint_sets(n) {
                let mut these = labelings.clone();
                if n > 3 {
                    these.push(vec![(1, 0); m]);
                    for _ in 1..PATTERNS_N4 {
                        these.push((0..m).map(|_| (rng.gen_range(1..=2), rng.gen_range(0..=1))).collect());
                    }
                }
                for lab in these {
                    let arcs: Vec<_> = g.iter().zip(&lab).map(|(&(t, h), &(w, c))| (t, h, w, c)).collect();
                    if !seen.insert(canonical_key(&arcs, &ws, &perms)) {
                        continue;
                    }
                    let name = format!("a-n{n}-g{gi:02}-{:05}", seen.len());
                    out.push(CorpusEntry { name, instance: build(n, &arcs, &ws) });
                }
            }
        }
    }
    out
}

pub fn random_corpus(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(3..=7);
            let mut p = RandomParams::new(n, rng.gen());
            p.density = rng.gen_range(0.05..0.35);
            p.weights = (1, 5);
            p.capacities = (1, 2);
            p.waypoints = rng.gen_range(2..=n.min(4));
            CorpusEntry { name: format!("b-{i:03}"), instance: gen_random(&p) }
        })
        .collect()
}

pub fn full_corpus(seed: u64) -> Vec<CorpusEntry> {
    let mut c = exhaustive_corpus(seed);
    c.extend(random_corpus(seed, RANDOM_COUNT));
    c
}

pub fn write_corpus(dir: &Path, entries: &[CorpusEntry]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for e in entries {
        fs::write(dir.join(format!("{}.dwrp", e.name)), serialize_instance(&e.instance))?;
    }
    Ok(())
}

/// Every `*.dwrp` file of `dir`, by file name.
pub fn read_corpus(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let io = |e: std::io::Error| Error::Semantic(format!("{}: {e}", dir.display()));
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dwrp"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).map_err(io)?;
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            Ok(CorpusEntry { name, instance: parse_instance(&text)? })
        })
        .collect()
}
