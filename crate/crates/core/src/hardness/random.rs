//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Arc, Capacity, Instance};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    pub n: usize,
    /// Probability that an ordered pair outside the backbone gets an arc.
    pub density: f64,
    pub weights: (u64, u64),
    /// Finite capacities are drawn from this range.
    pub capacities: (u64, u64),
    /// Probability that an arc is uncapacitated.
    pub unbounded: f64,
    pub waypoints: usize,
    /// Add a random Hamiltonian cycle first so the digraph is strongly
    /// connected.
    pub backbone: bool,
    pub seed: u64,
}

impl RandomParams {
    pub fn new(n: usize, seed: u64) -> Self {
        RandomParams {
            n,
            density: 0.3,
            weights: (1, 5),
            capacities: (1, 3),
            unbounded: 0.5,
            waypoints: n.min(3),
            backbone: true,
            seed,
        }
    }
}

pub fn gen_random(p: &RandomParams) -> Instance {
    assert!(p.n >= 2 && p.waypoints >= 2 && p.waypoints <= p.n);
    assert!(p.weights.0 >= 1 && p.weights.0 <= p.weights.1);
    assert!(p.capacities.0 >= 1 && p.capacities.0 <= p.capacities.1);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = p.n;
    let mut present = vec![false; n * n];
    if p.backbone {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for i in 0..n {
            present[order[i] * n + order[(i + 1) % n]] = true;
        }
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && !present[u * n + v] && rng.gen_bool(p.density.clamp(0.0, 1.0)) {
                present[u * n + v] = true;
            }
        }
    }
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if present[u * n + v] {
                let w = rng.gen_range(p.weights.0..=p.weights.1);
                let c = if rng.gen_bool(p.unbounded.clamp(0.0, 1.0)) {
                    Capacity::Unbounded
                } else {
                    Capacity::Finite(rng.gen_range(p.capacities.0..=p.capacities.1))
                };
                arcs.push(Arc::new(u, v, w, c));
            }
        }
    }
    let mut ws: Vec<usize> = (0..n).collect();
    ws.shuffle(&mut rng);
    ws.truncate(p.waypoints);
    Instance::new(n, arcs, ws, None, false).expect("generated instance is well formed")
}
