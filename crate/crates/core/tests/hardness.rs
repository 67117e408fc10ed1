use dwrp::hardness::{
    build_witness_walk, cds_brute_force, force_gadget_host, gen_cds_reduction, parse_cds, reduction_budget,
};
use dwrp::oracle::oracle_solve;
use dwrp::walk::validate_walk;

const STAR: &str = "cds 1
n 4
cap 0 3
cap 1 1
cap 2 1
cap 3 1
edge 0 1
edge 0 2
edge 0 3
k 1
";

#[test]
fn star_reduction_has_a_walk_at_budget() {
    let cds = parse_cds(STAR).unwrap();
    let w = cds_brute_force(&cds).unwrap().expect("the centre dominates the star");
    assert_eq!(w.set, vec![0]);
    let red = gen_cds_reduction(&cds);
    let walk = build_witness_walk(&cds, &red, &w).unwrap();
    let rep = validate_walk(&red.instance, &walk);
    assert!(rep.valid, "{:?}", rep.violations);
    assert_eq!(rep.cost, reduction_budget(3, 4, 1));
    assert_eq!(rep.cost, 3 * red.terminals as u64);
}

#[test]
fn star_centre_with_low_capacity_is_a_no_instance() {
    let cds = parse_cds(&STAR.replace("cap 0 3", "cap 0 2")).unwrap();
    assert_eq!(cds_brute_force(&cds).unwrap(), None);
}

#[test]
fn force_gadget_is_traversed_exactly_p_times() {
    for p in 1..=3 {
        let (inst, exit) = force_gadget_host(p);
        let walk = oracle_solve(&inst).unwrap().walk().cloned().unwrap();
        assert_eq!(walk.arcs.iter().filter(|&&a| a == exit).count(), p);
    }
}
