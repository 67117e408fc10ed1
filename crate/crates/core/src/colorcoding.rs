//! Solutions with few arc occurrences by color coding.
//!
//! Each arc is expanded into `min(capacity, k)` unit-capacity occurrences,
//! occurrences are colored with `k` colors, and a subset DP finds the
//! cheapest closed walk from a fixed waypoint that uses every color at most
//! once. A solution with at most `k` occurrences is found as soon as some
//! coloring in the family makes it colorful.
//!
//! Three families are available:
//!
//! * `Exhaustive`: all `k^m` colorings; only feasible for tiny expansions.
//! * `Block`: deterministic and complete for solutions of at most `k`
//!   occurrences. Occurrence `j` of arc `e` gets color `(p_e + j) mod k`.
//!   Arcs with `k` occurrences carry every color and get `p_e = 0`; for the
//!   remaining arcs `p` ranges over all non-decreasing offset sequences
//!   with steps bounded by the arc's occurrence count, which gives every
//!   occurrence pattern a block of private colors.
//! * `Randomized`: `ceil(e^k ln(1/delta))` uniform colorings from a seeded
//!   generator, failing with probability at most `delta`.
//!
//! The usual deterministic splitter construction is not used; `Block` plays
//! its role at desk scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{ArcId, Capacity, Instance, Vertex};
use crate::solution::Solution;
use crate::walk::ClosedWalk;

/// One arc occurrence of the expanded multigraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub tail: Vertex,
    pub head: Vertex,
    pub weight: u64,
    pub origin: ArcId,
    /// Index of this occurrence among those of `origin`.
    pub copy: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitMultigraph {
    pub n: usize,
    pub occurrences: Vec<Occurrence>,
}

impl UnitMultigraph {
    pub fn m(&self) -> usize {
        self.occurrences.len()
    }
}

/// Replaces each arc by `min(capacity, k)` parallel unit-capacity
/// occurrences; an unbounded arc gets `k`.
pub fn expand_to_unit_multigraph(inst: &Instance, k: usize) -> UnitMultigraph {
    let mut occurrences = Vec::new();
    for (id, a) in inst.arcs().iter().enumerate() {
        let copies = match a.capacity {
            Capacity::Finite(c) => c.min(k as u64),
            Capacity::Unbounded => k as u64,
        };
        for copy in 0..copies {
            occurrences.push(Occurrence {
                tail: a.tail,
                head: a.head,
                weight: a.weight,
                origin: id,
                copy,
            });
        }
    }
    UnitMultigraph { n: inst.n(), occurrences }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyMode {
    Exhaustive,
    Block,
    Randomized { seed: u64, delta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColoringFamily {
    pub mode: FamilyMode,
    pub k: usize,
    pub colorings: Vec<Vec<u8>>,
}

/// Number of random colorings for failure probability `delta`.
pub fn randomized_repeats(k: usize, delta: f64) -> usize {
    ((k as f64).exp() * (1.0 / delta).ln()).ceil() as usize
}

/// Default cap on the number of colorings a family may hold.
pub const DEFAULT_MAX_FAMILY: usize = 1_000_000;

/// Builds a coloring family for `umg`. `max_family` bounds the number of
/// colorings for the exhaustive and block modes.
pub fn coloring_family(
    umg: &UnitMultigraph,
    k: usize,
    mode: FamilyMode,
    max_family: usize,
) -> Result<ColoringFamily> {
    if k == 0 || k > 32 {
        return Err(Error::Unsupported(format!("k = {k} colors (supported: 1..=32)")));
    }
    let m = umg.m();
    let colorings = match mode {
        FamilyMode::Exhaustive => {
            let size = (k as f64).powi(m as i32);
            if size > max_family as f64 {
                return Err(Error::TooLarge(format!(
                    "{k}^{m} colorings exceed the limit {max_family}"
                )));
            }
            let mut all = Vec::with_capacity(size as usize);
            let mut cur = vec![0u8; m];
            loop {
                all.push(cur.clone());
                let mut i = 0;
                while i < m && cur[i] as usize == k - 1 {
                    cur[i] = 0;
                    i += 1;
                }
                if i == m {
                    break;
                }
                cur[i] += 1;
            }
            all
        }
        FamilyMode::Block => block_family(umg, k, max_family)?,
        FamilyMode::Randomized { seed, delta } => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::Unsupported(format!("delta = {delta} (need 0 < delta < 1)")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..randomized_repeats(k, delta))
                .map(|_| (0..m).map(|_| rng.gen_range(0..k) as u8).collect())
                .collect()
        }
    };
    Ok(ColoringFamily { mode, k, colorings })
}

fn block_family(umg: &UnitMultigraph, k: usize, max_family: usize) -> Result<Vec<Vec<u8>>> {
    // Group occurrences by origin arc, in order.
    let mut groups: Vec<(usize, usize)> = Vec::new(); // (first occurrence, count)
    for (i, o) in umg.occurrences.iter().enumerate() {
        if o.copy == 0 {
            groups.push((i, 1));
        } else {
            groups.last_mut().expect("copy 0 comes first").1 += 1;
        }
    }
    let tight: Vec<usize> = (0..groups.len()).filter(|&g| groups[g].1 < k).collect();
    let mut family = Vec::new();
    let mut offsets = vec![0usize; groups.len()];
    fn rec(
        t: usize,
        start: usize,
        tight: &[usize],
        groups: &[(usize, usize)],
        k: usize,
        offsets: &mut Vec<usize>,
        family: &mut Vec<Vec<u8>>,
        m: usize,
        max_family: usize,
    ) -> Result<()> {
        // Offsets of later arcs are irrelevant once every color is taken.
        if t == tight.len() || start == k {
            for &g in &tight[t..] {
                offsets[g] = k;
            }
            if family.len() == max_family {
                return Err(Error::TooLarge(format!(
                    "block coloring family exceeds the limit {max_family}"
                )));
            }
            let mut col = vec![0u8; m];
            for (g, &(first, count)) in groups.iter().enumerate() {
                for j in 0..count {
                    col[first + j] = ((offsets[g] + j) % k) as u8;
                }
            }
            family.push(col);
            return Ok(());
        }
        let g = tight[t];
        offsets[g] = start;
        // The step after the last tight arc changes nothing.
        let hi = if t + 1 == tight.len() { start } else { (start + groups[g].1).min(k) };
        for next in start..=hi {
            rec(t + 1, next, tight, groups, k, offsets, family, m, max_family)?;
        }
        Ok(())
    }
    rec(0, 0, &tight, &groups, k, &mut offsets, &mut family, umg.m(), max_family)?;
    Ok(family)
}

/// Largest DP table (states) the colorful DP will allocate.
pub const MAX_DP_STATES: usize = 1 << 27;

/// Cheapest closed walk from `w0` visiting all `waypoints` that uses each
/// color at most once under `coloring`. Returns the cost and the
/// occurrence sequence.
pub fn solve_colorful(
    umg: &UnitMultigraph,
    waypoints: &[Vertex],
    w0: Vertex,
    coloring: &[u8],
    k: usize,
) -> Result<Option<(u64, Vec<usize>)>> {
    let others: Vec<Vertex> = waypoints.iter().copied().filter(|&w| w != w0).collect();
    let mut wbit = vec![0usize; umg.n];
    for (i, &w) in others.iter().enumerate() {
        wbit[w] = 1 << i;
    }
    let n = umg.n;
    let masks = 1usize << others.len();
    let colors = 1usize << k;
    let states = masks
        .checked_mul(colors)
        .and_then(|x| x.checked_mul(n))
        .filter(|&s| s <= MAX_DP_STATES)
        .ok_or_else(|| {
            Error::TooLarge(format!("colorful DP with {} waypoints and k = {k}", waypoints.len()))
        })?;
    let idx = |c: usize, w: usize, v: usize| (c * masks + w) * n + v;
    let mut out_occ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, o) in umg.occurrences.iter().enumerate() {
        out_occ[o.tail].push(i);
    }
    const INF: u64 = u64::MAX;
    let mut cost = vec![INF; states];
    let mut back = vec![u32::MAX; states];
    cost[idx(0, 0, w0)] = 0;
    let full = masks - 1;
    let mut best: Option<(u64, usize)> = None;
    // Adding a color only increases the color-set index, so ascending order
    // is topological.
    for c in 0..colors {
        for w in 0..masks {
            for v in 0..n {
                let cur = cost[idx(c, w, v)];
                if cur == INF {
                    continue;
                }
                if v == w0 && w == full && c != 0 && best.is_none_or(|(b, _)| cur < b) {
                    best = Some((cur, idx(c, w, v)));
                }
                for &o in &out_occ[v] {
                    let bit = 1usize << coloring[o];
                    if c & bit != 0 {
                        continue;
                    }
                    let occ = &umg.occurrences[o];
                    let to = idx(c | bit, w | wbit[occ.head], occ.head);
                    let nc = cur + occ.weight;
                    if nc < cost[to] {
                        cost[to] = nc;
                        back[to] = o as u32;
                    }
                }
            }
        }
    }
    let Some((total, mut at)) = best else { return Ok(None) };
    // Walk back-pointers: the predecessor drops the occurrence's color and
    // possibly its head's waypoint bit; exactly one of the two candidates
    // carries the matching cost.
    let mut seq = Vec::new();
    loop {
        let v = at % n;
        let w = (at / n) % masks;
        let c = at / n / masks;
        if c == 0 {
            break;
        }
        let o = back[at] as usize;
        let occ = &umg.occurrences[o];
        let pc = c & !(1usize << coloring[o]);
        let target = cost[at] - occ.weight;
        let hb = wbit[v];
        let cand = [idx(pc, w, occ.tail), idx(pc, w & !hb, occ.tail)];
        at = *cand
            .iter()
            .find(|&&s| cost[s] == target)
            .ok_or_else(|| Error::Internal("broken colorful DP back-pointer".into()))?;
        seq.push(o);
    }
    seq.reverse();
    Ok(Some((total, seq)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorCodingConfig {
    pub k: usize,
    pub mode: FamilyMode,
    pub max_family: usize,
}

impl ColorCodingConfig {
    pub fn new(k: usize, mode: FamilyMode) -> Self {
        ColorCodingConfig { k, mode, max_family: DEFAULT_MAX_FAMILY }
    }
}

/// Cheapest solution among those with at most `k` arc occurrences that the
/// coloring family detects. With `Exhaustive` or `Block` this is exact.
pub fn solve_k_occurrences(inst: &Instance, cfg: ColorCodingConfig) -> Result<Solution> {
    let k = cfg.k;
    if k == 0 {
        return Err(Error::Unsupported("k must be at least 1".into()));
    }
    // Every waypoint needs an entering arc occurrence.
    if inst.waypoints().len() > k {
        return Ok(Solution::Infeasible);
    }
    let umg = expand_to_unit_multigraph(inst, k);
    let family = coloring_family(&umg, k, cfg.mode, cfg.max_family)?;
    let w0 = inst.waypoints()[0];
    let mut best: Option<(u64, Vec<usize>)> = None;
    for coloring in &family.colorings {
        if let Some((cost, seq)) = solve_colorful(&umg, inst.waypoints(), w0, coloring, k)? {
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, seq));
            }
        }
    }
    let opt = best.map(|(cost, seq)| {
        let arcs = seq.iter().map(|&o| umg.occurrences[o].origin).collect();
        (cost, ClosedWalk::new(w0, arcs))
    });
    Ok(Solution::from_optimum(inst, opt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Arc;
    use crate::oracle::{oracle_solve, solve_enumeration_with, EnumOptions};

    fn two_cycle() -> Instance {
        let arcs = vec![
            Arc::new(0, 1, 1, Capacity::Unbounded),
            Arc::new(1, 0, 1, Capacity::Unbounded),
        ];
        Instance::new(2, arcs, vec![0, 1], None, false).unwrap()
    }

    #[test]
    fn expansion_counts() {
        let arcs = vec![
            Arc::new(0, 1, 1, Capacity::Finite(1)),
            Arc::new(1, 2, 1, Capacity::Finite(2)),
            Arc::new(2, 0, 1, Capacity::Unbounded),
        ];
        let inst = Instance::new(3, arcs, vec![0, 1], None, false).unwrap();
        assert_eq!(expand_to_unit_multigraph(&inst, 2).m(), 5);
        let cap3 = Instance::new(
            2,
            vec![Arc::new(0, 1, 1, Capacity::Finite(3)), Arc::new(1, 0, 1, Capacity::Unbounded)],
            vec![0, 1],
            None,
            false,
        )
        .unwrap();
        assert_eq!(expand_to_unit_multigraph(&cap3, 2).m(), 4);
        assert_eq!(expand_to_unit_multigraph(&cap3, 4).m(), 3 + 4);
    }

    #[test]
    fn family_sizes() {
        let umg = UnitMultigraph {
            n: 2,
            occurrences: (0..2)
                .map(|i| Occurrence { tail: 0, head: 1, weight: 1, origin: i, copy: 0 })
                .collect(),
        };
        let f = coloring_family(&umg, 2, FamilyMode::Exhaustive, 100).unwrap();
        assert_eq!(f.colorings.len(), 4);
        assert_eq!(randomized_repeats(3, 0.01), 93);
        let f = coloring_family(&umg, 3, FamilyMode::Randomized { seed: 1, delta: 0.01 }, 0)
            .unwrap();
        assert_eq!(f.colorings.len(), 93);
    }

    #[test]
    fn colorful_dp_basics() {
        let inst = two_cycle();
        let umg = expand_to_unit_multigraph(&inst, 1);
        assert_eq!(umg.m(), 2);
        let r = solve_colorful(&umg, &[0, 1], 0, &[0, 1], 2).unwrap();
        assert_eq!(r.map(|x| x.0), Some(2));
        let r = solve_colorful(&umg, &[0, 1], 0, &[0, 0], 2).unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn k_occurrence_solver() {
        let inst = two_cycle();
        let cfg = ColorCodingConfig::new(2, FamilyMode::Exhaustive);
        assert_eq!(solve_k_occurrences(&inst, cfg).unwrap().cost(), Some(2));
        let cfg = ColorCodingConfig::new(1, FamilyMode::Exhaustive);
        assert_eq!(solve_k_occurrences(&inst, cfg).unwrap(), Solution::Infeasible);
        let tri = Instance::new(
            3,
            (0..3).map(|i| Arc::new(i, (i + 1) % 3, 1, Capacity::Unbounded)).collect(),
            vec![0, 1, 2],
            None,
            false,
        )
        .unwrap();
        let s = solve_k_occurrences(&tri, ColorCodingConfig::new(3, FamilyMode::Block)).unwrap();
        assert_eq!(s.cost(), Some(3));
        assert!(s.witness_ok(&tri));
    }

    /// Star whose optimum needs 4 occurrences; the block family must agree
    /// with the exhaustive family and with the restricted enumeration.
    #[test]
    fn block_family_matches_exhaustive() {
        let arcs = vec![
            Arc::new(0, 1, 1, Capacity::Finite(1)),
            Arc::new(1, 0, 2, Capacity::Finite(1)),
            Arc::new(0, 2, 1, Capacity::Unbounded),
            Arc::new(2, 0, 1, Capacity::Finite(1)),
            Arc::new(1, 2, 3, Capacity::Finite(1)),
        ];
        let inst = Instance::new(3, arcs, vec![0, 1, 2], None, false).unwrap();
        for k in 1..=5 {
            let bl = solve_k_occurrences(&inst, ColorCodingConfig::new(k, FamilyMode::Block))
                .unwrap();
            let opts = EnumOptions { max_occurrences: Some(k as u64), ..Default::default() };
            let en = solve_enumeration_with(&inst, opts).unwrap();
            assert_eq!(bl.cost(), en.cost(), "k = {k}");
            assert!(bl.witness_ok(&inst));
            if k <= 4 {
                let cfg = ColorCodingConfig::new(k, FamilyMode::Exhaustive);
                assert_eq!(solve_k_occurrences(&inst, cfg).unwrap().cost(), en.cost(), "k = {k}");
            }
        }
        assert_eq!(
            solve_k_occurrences(&inst, ColorCodingConfig::new(5, FamilyMode::Block))
                .unwrap()
                .cost(),
            oracle_solve(&inst).unwrap().cost()
        );
    }
}
