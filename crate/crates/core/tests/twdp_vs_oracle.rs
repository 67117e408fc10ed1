use dwrp::hardness::{gen_random, RandomParams};
use dwrp::oracle::oracle_solve;
use dwrp::structparams::{exact_tree_decomposition, UnderlyingGraph};
use dwrp::twdp::{solve_twdp, twdp_run, DEFAULT_MAX_ENTRIES};

#[test]
fn random_instances_match_oracle() {
    let mut checked = 0;
    for seed in 0..120u64 {
        let n = 3 + (seed % 7) as usize;
        let p = RandomParams {
            density: [0.1, 0.2, 0.3][seed as usize % 3],
            weights: (1, 4),
            waypoints: 2 + (seed as usize % 3).min(n - 2),
            ..RandomParams::new(n, 9000 + seed)
        };
        let inst = gen_random(&p);
        let (td, _) = exact_tree_decomposition(&UnderlyingGraph::of(&inst));
        if td.width() > 3 {
            continue;
        }
        let sol = solve_twdp(&inst, None).unwrap();
        assert_eq!(sol.cost(), oracle_solve(&inst).unwrap().cost(), "seed {seed}");
        assert!(sol.witness_ok(&inst), "seed {seed}");
        checked += 1;
    }
    assert!(checked > 60, "{checked}");
}

#[test]
fn cost_nonincreasing_in_nu() {
    for seed in 0..30u64 {
        let p = RandomParams { density: 0.15, ..RandomParams::new(6, 700 + seed) };
        let inst = gen_random(&p);
        let w = inst.waypoints().len();
        let costs: Vec<u64> = (1..=w + 1)
            .map(|nu| twdp_run(&inst, Some(nu), DEFAULT_MAX_ENTRIES).unwrap().cost().unwrap_or(u64::MAX))
            .collect();
        for pair in costs.windows(2) {
            assert!(pair[1] <= pair[0], "seed {seed}: {costs:?}");
        }
        assert_eq!(costs[w - 1], costs[w], "seed {seed}");
    }
}
