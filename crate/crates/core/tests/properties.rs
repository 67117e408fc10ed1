use dwrp::format::{parse_instance, parse_solution, serialize_instance, serialize_solution, vertices_to_walk, SolutionText};
use dwrp::hardness::{gen_random, RandomParams};
use dwrp::paths::metric_closure;
use dwrp::walk::{cycle_decompose, multiset_to_walk};
use dwrp::{ClosedWalk, Instance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(n: usize, seed: u64, density: f64) -> Instance {
    let p = RandomParams { density, waypoints: 2 + seed as usize % (n - 1), ..RandomParams::new(n, seed) };
    gen_random(&p)
}

/// A random walk of `steps` arcs from `start`, closed by a shortest path back.
fn random_closed_walk(inst: &Instance, start: usize, steps: usize, seed: u64) -> ClosedWalk {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    let mut at = start;
    for _ in 0..steps {
        let outs = inst.out_arcs(at);
        let a = outs[rng.gen_range(0..outs.len())];
        arcs.push(a);
        at = inst.arc(a).head;
    }
    arcs.extend(metric_closure(inst).path(at, start).expect("strongly connected"));
    ClosedWalk::new(start, arcs)
}

proptest! {
    #[test]
    fn instance_text_round_trip(n in 2usize..8, seed in any::<u64>(), density in 0.0f64..0.8) {
        let inst = instance(n, seed, density);
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn solution_text_round_trip(n in 2usize..8, seed in any::<u64>(), steps in 0usize..12) {
        let inst = instance(n, seed, 0.3);
        let walk = random_closed_walk(&inst, inst.waypoints()[0], steps, seed);
        let cost = walk.cost(&inst);
        let text = serialize_solution(&inst, Some((cost, &walk)));
        let SolutionText::Walk { cost: parsed, vertices } = parse_solution(&text).unwrap() else {
            panic!("expected a walk");
        };
        prop_assert_eq!(parsed, Some(cost));
        let back = vertices_to_walk(&inst, &vertices).unwrap();
        prop_assert_eq!(back.vertices(&inst), walk.vertices(&inst));
        prop_assert_eq!(back.cost(&inst), cost);
    }

    #[test]
    fn metric_closure_is_a_metric(n in 2usize..9, seed in any::<u64>(), density in 0.0f64..0.6) {
        let inst = instance(n, seed, density);
        let d = metric_closure(&inst);
        for u in 0..n {
            prop_assert_eq!(d.dist(u, u), Some(0));
            for v in 0..n {
                let duv = d.dist(u, v).unwrap();
                let path = d.path(u, v).unwrap();
                prop_assert_eq!(path.iter().map(|&a| inst.arc(a).weight).sum::<u64>(), duv);
                for w in 0..n {
                    prop_assert!(d.dist(u, w).unwrap() <= duv + d.dist(v, w).unwrap());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn cycle_decomposition_of_closed_walks(n in 2usize..8, seed in any::<u64>(), steps in 0usize..25) {
        let inst = instance(n, seed, 0.4);
        let walk = random_closed_walk(&inst, seed as usize % n, steps, seed);
        let cycles = cycle_decompose(&inst, &walk).unwrap();
        let mut sum = vec![0u64; inst.m()];
        for c in &cycles {
            let vs = c.vertices(&inst);
            prop_assert_eq!(vs.first(), vs.last());
            let mut inner = vs[1..].to_vec();
            inner.sort_unstable();
            inner.dedup();
            prop_assert_eq!(inner.len(), c.len(), "cycle is not simple");
            for &a in &c.arcs {
                sum[a] += 1;
            }
        }
        prop_assert_eq!(sum, walk.multiset(&inst).mult);
    }

    #[test]
    fn multiset_walk_round_trip(n in 2usize..8, seed in any::<u64>(), steps in 1usize..25) {
        let inst = instance(n, seed, 0.4);
        let start = seed as usize % n;
        let walk = random_closed_walk(&inst, start, steps, seed);
        let ms = walk.multiset(&inst);
        let back = multiset_to_walk(&inst, &ms, start).unwrap();
        prop_assert_eq!(back.start, start);
        prop_assert_eq!(back.vertices(&inst).last().copied(), Some(start));
        prop_assert_eq!(back.multiset(&inst), ms);
    }
}
