//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use dwrp::colorcoding::{solve_k_occurrences, ColorCodingConfig, FamilyMode};
use dwrp::hardness::{
    build_witness_walk, cds_brute_force, force_gadget_host, gen_cds_reduction, gen_random, reduction_budget,
    CdsInstance, RandomParams,
};
use dwrp::oracle::oracle_solve;
use dwrp::twdp::{twdp_run, DEFAULT_MAX_ENTRIES};
use dwrp::walk::validate_walk;
use dwrp::{Capacity, Instance};
use dwrp_cli::bench::{render_report, run_bench, BenchRecord, Outcome, BENCH_ALGOS};
use dwrp_cli::corpus::{full_corpus, CorpusEntry};
use dwrp_cli::solve::Algo;

const SEED: u64 = 0;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn column(a: Algo) -> usize {
    BENCH_ALGOS.iter().position(|&b| b == a).unwrap()
}

fn cross_solver(records: &[BenchRecord]) -> Verdict {
    let mut bad = Vec::new();
    let mut ran = [0usize; BENCH_ALGOS.len()];
    for r in records {
        for (i, o) in r.outcomes.iter().enumerate() {
            if *o != Outcome::Skipped {
                ran[i] += 1;
            }
        }
        let oracle = &r.outcomes[column(Algo::Oracle)];
        let twdp = &r.outcomes[column(Algo::Twdp)];
        // colorcoding only runs when the oracle found a witness
        let cc_missing =
            matches!(oracle, Outcome::Cost(Some(_))) && r.outcomes[column(Algo::Colorcoding)] == Outcome::Skipped;
        if !r.agrees() || *twdp == Outcome::Skipped || cc_missing {
            bad.push(r.name.clone());
        }
    }
    let runs: Vec<String> = BENCH_ALGOS.iter().zip(ran).map(|(a, c)| format!("{}={c}", a.name())).collect();
    let mut detail = format!("{} instances, runs {}", records.len(), runs.join(" "));
    if !bad.is_empty() {
        detail += &format!(", disagreeing: {}", bad.iter().take(5).cloned().collect::<Vec<_>>().join(" "));
    }
    verdict(bad.is_empty(), detail)
}

fn visit_bound(corpus: &[CorpusEntry], records: &[BenchRecord]) -> Verdict {
    let mut checked = 0;
    let mut violations = Vec::new();
    for (e, r) in corpus.iter().zip(records).filter(|(e, _)| e.name.starts_with("a-")) {
        let Some(walk) = r.oracle.as_ref().and_then(|s| s.walk()) else { continue };
        checked += 1;
        let inst = &e.instance;
        let w = inst.waypoints().len();
        for (v, &visits) in walk.visit_counts(inst).iter().enumerate() {
            let bound = w - usize::from(inst.is_waypoint(v));
            if visits > bound {
                violations.push(format!("{} v{v} {visits}>{bound}", e.name));
            }
        }
    }
    verdict(violations.is_empty(), format!("{checked} witnesses, {} violations", violations.len()))
}

fn fes_bounds(records: &[BenchRecord]) -> Verdict {
    let mut runs = 0;
    let mut branches = 0;
    let mut bad = Vec::new();
    for r in records {
        if let Some((_, st)) = &r.fes {
            runs += 1;
            branches += st.branches;
            if !st.within_bounds() {
                bad.push(format!("{} {st:?}", r.name));
            }
        }
    }
    let mut detail = format!("{runs} runs, {branches} branches, {} out of bounds", bad.len());
    if let Some(b) = bad.first() {
        detail += &format!(", first: {b}");
    }
    verdict(runs > 0 && bad.is_empty(), detail)
}

fn vi_bounds(records: &[BenchRecord]) -> Verdict {
    let mut runs = 0;
    let mut traversals = 0;
    let mut bad = Vec::new();
    for r in records {
        if let Some((k, st)) = &r.vi {
            runs += 1;
            traversals += st.traversals;
            if st.max_traversal_occurrences > k * (k + 2) || st.max_traversal_arc_use > *k as u64 {
                bad.push(format!(
                    "{} k={k} occurrences={} arc_use={}",
                    r.name, st.max_traversal_occurrences, st.max_traversal_arc_use
                ));
            }
        }
    }
    let mut detail = format!("{runs} runs, {traversals} traversals, {} violations", bad.len());
    if let Some(b) = bad.first() {
        detail += &format!(", first: {b}");
    }
    verdict(runs > 0 && bad.is_empty(), detail)
}

fn twdp_root(corpus: &[CorpusEntry], records: &[BenchRecord]) -> Verdict {
    const SAMPLE: usize = 50;
    let step = corpus.len() / SAMPLE;
    let mut bad = Vec::new();
    for i in (0..SAMPLE).map(|j| j * step) {
        let (e, r) = (&corpus[i], &records[i]);
        let inst = &e.instance;
        let run = match twdp_run(inst, None, DEFAULT_MAX_ENTRIES) {
            Ok(run) => run,
            Err(err) => {
                bad.push(format!("{}: {err}", e.name));
                continue;
            }
        };
        let w0 = inst.waypoints()[0];
        let root = run.nice.root;
        if run.nu != inst.waypoints().len() || run.anchor != w0 || run.nice.nodes[root].bag != [w0] {
            bad.push(format!("{}: root bag {:?}", e.name, run.nice.nodes[root].bag));
            continue;
        }
        let recomputed = run.tables[root]
            .entries
            .iter()
            .filter(|x| {
                x.key.block == [0] && x.key.ins.len() == 1 && x.key.ins == x.key.outs && {
                    let i = x.key.ins[0] as usize;
                    (1..=run.nu).contains(&i)
                }
            })
            .map(|x| x.cost)
            .min();
        let oracle = r.oracle.as_ref().and_then(|s| s.cost());
        if recomputed != run.cost() || recomputed != run.root_answer() || recomputed != oracle {
            bad.push(format!("{}: table {recomputed:?} run {:?} oracle {oracle:?}", e.name, run.cost()));
        }
    }
    let mut detail = format!("{SAMPLE} instances, {} mismatches", bad.len());
    if let Some(b) = bad.first() {
        detail += &format!(", first: {b}");
    }
    verdict(bad.is_empty(), detail)
}

fn color_coding() -> Verdict {
    const WANT: usize = 100;
    const K: usize = 5;
    const DELTA: f64 = 0.01;
    let mut yes = Vec::new();
    let mut seed = 0u64;
    while yes.len() < WANT {
        seed += 1;
        let n = 3 + (seed % 4) as usize;
        let mut p = RandomParams::new(n, seed);
        p.density = 0.25;
        p.waypoints = 2 + (seed % 2) as usize;
        let inst = gen_random(&p);
        let sol = oracle_solve(&inst).expect("oracle runs on small instances");
        if let (Some(cost), Some(walk)) = (sol.cost(), sol.walk()) {
            if walk.len() <= K {
                yes.push((seed, inst, cost));
            }
        }
    }
    let mut random_fail = 0;
    let mut block_fail = 0;
    for (seed, inst, cost) in &yes {
        let run = |mode| solve_k_occurrences(inst, ColorCodingConfig::new(K, mode)).ok().and_then(|s| s.cost());
        if run(FamilyMode::Randomized { seed: *seed, delta: DELTA }) != Some(*cost) {
            random_fail += 1;
        }
        if run(FamilyMode::Block) != Some(*cost) {
            block_fail += 1;
        }
    }
    let rate = random_fail as f64 / WANT as f64;
    verdict(
        rate <= 0.05 && block_fail == 0,
        format!("{WANT} yes-instances, k={K}: randomized failures {random_fail} ({:.0}%), block failures {block_fail}", rate * 100.0),
    )
}

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

/// One edge list per isomorphism class of graphs on `n` vertices without
/// isolated vertices.
fn graphs_without_isolated(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<_> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        if (0..n).any(|v| !edges.iter().any(|&(a, b)| a == v || b == v)) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut e: Vec<_> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
                e.sort_unstable();
                e
            })
            .min()
            .unwrap();
        seen.insert(canon);
    }
    seen.into_iter().collect()
}

fn capacity_vectors(deg: &[u64]) -> Vec<Vec<u64>> {
    deg.iter().fold(vec![vec![]], |acc, &d| {
        acc.iter().flat_map(|c| (1..=d).map(move |x| [c.clone(), vec![x]].concat())).collect()
    })
}

fn force_traversals(p: usize) -> Result<(), String> {
    let (inst, arc) = force_gadget_host(p);
    let sol = oracle_solve(&inst).map_err(|e| e.to_string())?;
    let walk = sol.walk().ok_or(format!("p={p}: no walk"))?;
    let uses = walk.arcs.iter().filter(|&&a| a == arc).count();
    if uses != p {
        return Err(format!("p={p}: {uses} traversals"));
    }
    // one fewer allowed traversal leaves some v_i unreachable
    let arcs = inst
        .arcs()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != arc || p > 1)
        .map(|(i, a)| if i == arc { dwrp::Arc { capacity: Capacity::Finite(p as u64 - 1), ..*a } } else { *a })
        .collect();
    let tight = Instance::relaxed(inst.n(), arcs, inst.waypoints().to_vec(), None, false).map_err(|e| e.to_string())?;
    match oracle_solve(&tight).map_err(|e| e.to_string())?.cost() {
        None => Ok(()),
        Some(c) => Err(format!("p={p}: capacity p-1 still solvable at {c}")),
    }
}

fn hardness() -> Verdict {
    let mut instances = 0;
    let mut yes = 0;
    let mut bad = Vec::new();
    for n in 2..=5 {
        for edges in graphs_without_isolated(n) {
            let mut deg = vec![0u64; n];
            for &(a, b) in &edges {
                deg[a] += 1;
                deg[b] += 1;
            }
            for caps in capacity_vectors(&deg) {
                for k in 1..=2 {
                    instances += 1;
                    let cds = CdsInstance::new(n, edges.clone(), caps.clone(), k).expect("valid cds instance");
                    let Some(w) = cds_brute_force(&cds).expect("small instance") else { continue };
                    yes += 1;
                    let red = gen_cds_reduction(&cds);
                    let expected = reduction_budget(edges.len(), n, k);
                    let fail = match build_witness_walk(&cds, &red, &w) {
                        Err(e) => Some(e.to_string()),
                        Ok(walk) => {
                            let rep = validate_walk(&red.instance, &walk);
                            if !rep.valid {
                                Some(format!("{:?}", rep.violations.first()))
                            } else if rep.cost != expected
                                || red.instance.budget() != Some(expected)
                                || expected != 3 * red.terminals as u64
                            {
                                Some(format!("cost {} budget {:?} terminals {}", rep.cost, red.instance.budget(), red.terminals))
                            } else {
                                None
                            }
                        }
                    };
                    if let Some(f) = fail {
                        bad.push(format!("{}: {f}", dwrp::hardness::serialize_cds(&cds).replace('\n', " ")));
                    }
                }
            }
        }
    }
    for p in 1..=2 {
        if let Err(e) = force_traversals(p) {
            bad.push(format!("force gadget {e}"));
        }
    }
    let mut detail = format!("{instances} cds instances, {yes} yes, force gadget p<=2, {} failures", bad.len());
    if let Some(b) = bad.first() {
        detail += &format!(", first: {b}");
    }
    verdict(yes > 0 && bad.is_empty(), detail)
}

fn bench_binary(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dwrp"))
        .args(["--seed", &SEED.to_string(), "--quiet"])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    // exit 1 only flags mismatches, which criterion 1 reports
    match out.status.code() {
        Some(0 | 1) => Ok(out.stdout),
        c => Err(format!("{args:?} exited with {c:?}: {}", String::from_utf8_lossy(&out.stderr))),
    }
}

fn determinism(records: &[BenchRecord]) -> Verdict {
    let run = || -> Result<Verdict, String> {
        let first = bench_binary(&["bench"])?;
        let second = bench_binary(&["bench"])?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let corpus = dir.path().join("corpus");
        bench_binary(&["gen", "corpus", "--out", corpus.to_str().unwrap()])?;
        let from_files = bench_binary(&["bench", "--corpus", corpus.to_str().unwrap()])?;
        let library = render_report(records).into_bytes();
        let same = first == second && first == from_files && first == library;
        Ok(verdict(
            same,
            format!(
                "two runs {}, written corpus {}, library report {} ({} bytes)",
                if first == second { "identical" } else { "differ" },
                if first == from_files { "identical" } else { "differs" },
                if first == library { "identical" } else { "differs" },
                first.len()
            ),
        ))
    };
    run().unwrap_or_else(|e| verdict(false, e))
}

fn main() {
    let start = Instant::now();
    let corpus = full_corpus(SEED);
    let records = run_bench(&corpus, |_| {});
    let mut results = vec![
        ("cross-solver exactness", cross_solver(&records)),
        ("oracle visit bound", visit_bound(&corpus, &records)),
        ("fes compressed size bounds", fes_bounds(&records)),
        ("vi traversal bounds", vi_bounds(&records)),
        ("twdp root answer", twdp_root(&corpus, &records)),
    ];
    results.push(("color coding failure rates", color_coding()));
    results.push(("hardness generators", hardness()));
    results.push(("bench determinism", determinism(&records)));
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!("{} {} {name}: {}", if v.ok { "PASS" } else { "FAIL" }, i + 1, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("{} of {} criteria passed in {:.1}s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
