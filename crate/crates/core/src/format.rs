//! Line-oriented text formats for instances and solutions.
//!
//! ```text
//! dwrp 1
//! n 3
//! waypoints 0 2
//! budget none
//! arc 0 1 1 inf
//! arc 1 2 4 2
//! arc 2 0 1 inf
//! ```
//!
//! Solutions are either `INFEASIBLE` or a `COST <int>` line followed by
//! `WALK <v0> <v1> ... <v0>`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{Arc, Capacity, Instance, Vertex};
use crate::walk::ClosedWalk;

pub(crate) fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

pub(crate) fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected {what}, found `{tok}`")))
}

pub(crate) fn strip_comment(raw: &str) -> &str {
    match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut magic = false;
    let mut n: Option<usize> = None;
    let mut waypoints: Option<Vec<Vertex>> = None;
    let mut budget: Option<Option<u64>> = None;
    let mut multiarc = false;
    let mut arcs = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        let Some((&key, rest)) = toks.split_first() else { continue };
        if !magic {
            if key != "dwrp" || rest != ["1"] {
                return Err(parse_err(line, "expected header `dwrp 1`"));
            }
            magic = true;
            continue;
        }
        match key {
            "n" => {
                if n.is_some() {
                    return Err(parse_err(line, "duplicate `n` line"));
                }
                if rest.len() != 1 {
                    return Err(parse_err(line, "`n` takes one integer"));
                }
                n = Some(parse_num(rest[0], line, "vertex count")?);
            }
            "waypoints" => {
                if waypoints.is_some() {
                    return Err(parse_err(line, "duplicate `waypoints` line"));
                }
                let ws = rest
                    .iter()
                    .map(|t| parse_num(t, line, "vertex id"))
                    .collect::<Result<Vec<Vertex>>>()?;
                waypoints = Some(ws);
            }
            "budget" => {
                if budget.is_some() {
                    return Err(parse_err(line, "duplicate `budget` line"));
                }
                if rest.len() != 1 {
                    return Err(parse_err(line, "`budget` takes an integer or `none`"));
                }
                budget = Some(match rest[0] {
                    "none" => None,
                    t => Some(parse_num(t, line, "budget")?),
                });
            }
            "multiarc" => {
                if rest != ["on"] {
                    return Err(parse_err(line, "expected `multiarc on`"));
                }
                if !arcs.is_empty() {
                    return Err(parse_err(line, "`multiarc on` must precede the first arc"));
                }
                multiarc = true;
            }
            "arc" => {
                if rest.len() != 4 {
                    return Err(parse_err(line, "`arc` takes tail, head, weight, capacity"));
                }
                let tail = parse_num(rest[0], line, "tail")?;
                let head = parse_num(rest[1], line, "head")?;
                let weight = parse_num(rest[2], line, "weight")?;
                let capacity = match rest[3] {
                    "inf" => Capacity::Unbounded,
                    t => Capacity::Finite(parse_num(t, line, "capacity")?),
                };
                arcs.push(Arc::new(tail, head, weight, capacity));
            }
            other => return Err(parse_err(line, format!("unknown keyword `{other}`"))),
        }
    }
    if !magic {
        return Err(parse_err(1, "empty input"));
    }
    let n = n.ok_or_else(|| parse_err(0, "missing `n` line"))?;
    let waypoints = waypoints.ok_or_else(|| parse_err(0, "missing `waypoints` line"))?;
    Instance::new(n, arcs, waypoints, budget.unwrap_or(None), multiarc)
}

/// Canonical text form. Arcs come out in the instance's canonical order.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::from("dwrp 1\n");
    let _ = writeln!(out, "n {}", inst.n());
    out.push_str("waypoints");
    for w in inst.waypoints() {
        let _ = write!(out, " {w}");
    }
    out.push('\n');
    match inst.budget() {
        Some(b) => {
            let _ = writeln!(out, "budget {b}");
        }
        None => out.push_str("budget none\n"),
    }
    if inst.multiarc() {
        out.push_str("multiarc on\n");
    }
    for a in inst.arcs() {
        let _ = writeln!(out, "arc {} {} {} {}", a.tail, a.head, a.weight, a.capacity);
    }
    out
}

/// Parsed solution file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionText {
    Infeasible,
    Walk { cost: Option<u64>, vertices: Vec<Vertex> },
}

pub fn parse_solution(text: &str) -> Result<SolutionText> {
    let mut cost = None;
    let mut vertices = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        let Some((&key, rest)) = toks.split_first() else { continue };
        match key {
            "INFEASIBLE" => return Ok(SolutionText::Infeasible),
            "COST" => {
                if rest.len() != 1 {
                    return Err(parse_err(line, "`COST` takes one integer"));
                }
                cost = Some(parse_num(rest[0], line, "cost")?);
            }
            "WALK" => {
                let vs = rest
                    .iter()
                    .map(|t| parse_num(t, line, "vertex id"))
                    .collect::<Result<Vec<Vertex>>>()?;
                vertices = Some(vs);
            }
            other => return Err(parse_err(line, format!("unknown keyword `{other}`"))),
        }
    }
    let vertices = vertices.ok_or_else(|| parse_err(0, "missing `WALK` line"))?;
    Ok(SolutionText::Walk { cost, vertices })
}

/// Turns a vertex sequence into arcs. For parallel arcs the lowest-index arc
/// with remaining capacity is taken, falling back to the lowest-index arc.
/// A single vertex is the empty walk anchored there.
pub fn vertices_to_walk(inst: &Instance, vertices: &[Vertex]) -> Result<ClosedWalk> {
    let Some(&start) = vertices.first() else {
        return Err(Error::Semantic("walk has no vertices".into()));
    };
    if let Some(&v) = vertices.iter().find(|&&v| v >= inst.n()) {
        return Err(Error::Semantic(format!("walk vertex {v} out of range")));
    }
    let mut used = vec![0u64; inst.m()];
    let mut arcs = Vec::with_capacity(vertices.len().saturating_sub(1));
    for pair in vertices.windows(2) {
        let (t, h) = (pair[0], pair[1]);
        let candidates: Vec<usize> = inst
            .out_arcs(t)
            .iter()
            .copied()
            .filter(|&a| inst.arc(a).head == h)
            .collect();
        let chosen = candidates
            .iter()
            .copied()
            .find(|&a| used[a] < inst.cap_bound(a))
            .or_else(|| candidates.first().copied())
            .ok_or_else(|| Error::Semantic(format!("walk uses missing arc {t} -> {h}")))?;
        used[chosen] += 1;
        arcs.push(chosen);
    }
    Ok(ClosedWalk::new(start, arcs))
}

/// `COST`/`WALK` text for a walk, or `INFEASIBLE` for `None`.
pub fn serialize_solution(inst: &Instance, sol: Option<(u64, &ClosedWalk)>) -> String {
    match sol {
        None => "INFEASIBLE\n".to_string(),
        Some((cost, walk)) => {
            let mut out = format!("COST {cost}\nWALK");
            for v in walk.vertices(inst) {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_CYCLE: &str = "dwrp 1\nn 2\nwaypoints 0 1\nbudget 2\narc 0 1 1 inf\narc 1 0 1 inf\n";

    #[test]
    fn parses_minimal_instance() {
        let inst = parse_instance(TWO_CYCLE).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.waypoints(), &[0, 1]);
        assert_eq!(inst.budget(), Some(2));
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let inst = parse_instance(TWO_CYCLE).unwrap();
        assert_eq!(serialize_instance(&inst), TWO_CYCLE);
    }

    #[test]
    fn arc_order_does_not_matter() {
        let a = parse_instance(TWO_CYCLE).unwrap();
        let b = parse_instance(
            "dwrp 1\n# swapped\nn 2\nwaypoints 1 0\nbudget 2\narc 1 0 1 inf\narc 0 1 1 inf\n",
        )
        .unwrap();
        assert_eq!(serialize_instance(&a), serialize_instance(&b));
    }

    #[test]
    fn errors_carry_kind() {
        let one_wp = "dwrp 1\nn 2\nwaypoints 0\n";
        assert!(matches!(parse_instance(one_wp), Err(Error::Semantic(_))));
        let range = "dwrp 1\nn 2\nwaypoints 0 1\narc 0 5 1 1\n";
        assert!(matches!(parse_instance(range), Err(Error::Semantic(_))));
        let bad = "dwrp 1\nn 2\nwaypoints 0 1\narc 0 1 x 1\n";
        assert!(matches!(parse_instance(bad), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(parse_instance("n 2\n"), Err(Error::Parse { line: 1, .. })));
        let dup = "dwrp 1\nn 2\nwaypoints 0 1\narc 0 1 1 1\narc 0 1 2 1\n";
        assert!(parse_instance(dup).is_err());
        let multi = "dwrp 1\nn 2\nwaypoints 0 1\nmultiarc on\narc 0 1 1 1\narc 0 1 2 1\n";
        assert_eq!(parse_instance(multi).unwrap().m(), 2);
    }

    #[test]
    fn solution_round_trip() {
        let inst = parse_instance(TWO_CYCLE).unwrap();
        let walk = vertices_to_walk(&inst, &[0, 1, 0]).unwrap();
        let text = serialize_solution(&inst, Some((2, &walk)));
        assert_eq!(text, "COST 2\nWALK 0 1 0\n");
        assert_eq!(
            parse_solution(&text).unwrap(),
            SolutionText::Walk { cost: Some(2), vertices: vec![0, 1, 0] }
        );
        assert_eq!(parse_solution("INFEASIBLE\n").unwrap(), SolutionText::Infeasible);
    }
}
