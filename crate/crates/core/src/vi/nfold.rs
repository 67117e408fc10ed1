//! Block-structured integer programs and an exact branch-and-bound solver.
//!
//! Variables belong to bricks; local rows mention variables of one brick,
//! global rows link bricks. The solver is a depth-first search over
//! variables in brick order with linear bound propagation. Rows flagged as
//! exactly-one choices over binaries also contribute their cheapest
//! remaining option to the objective bound.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Var {
    pub lo: i64,
    pub hi: i64,
    pub cost: i64,
    pub brick: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
    /// Brick of a local row; `None` for a global one.
    pub brick: Option<usize>,
    /// Binaries summing to exactly one.
    pub choice: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NFoldProgram {
    pub vars: Vec<Var>,
    pub rows: Vec<Row>,
    pub bricks: usize,
}

impl NFoldProgram {
    pub fn add_var(&mut self, lo: i64, hi: i64, cost: i64, brick: usize) -> usize {
        self.bricks = self.bricks.max(brick + 1);
        self.vars.push(Var { lo, hi, cost, brick });
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, i64)>, sense: Sense, rhs: i64, brick: Option<usize>) {
        self.rows.push(Row { coeffs, sense, rhs, brick, choice: false });
    }

    /// `Σ vars = 1` over binaries of one brick.
    pub fn add_choice(&mut self, vars: &[usize], brick: usize) {
        self.rows.push(Row {
            coeffs: vars.iter().map(|&v| (v, 1)).collect(),
            sense: Sense::Eq,
            rhs: 1,
            brick: Some(brick),
            choice: true,
        });
    }

    pub fn is_feasible(&self, x: &[i64]) -> bool {
        self.vars.iter().zip(x).all(|(v, &x)| v.lo <= x && x <= v.hi)
            && self.rows.iter().all(|r| {
                let act: i64 = r.coeffs.iter().map(|&(i, a)| a * x[i]).sum();
                match r.sense {
                    Sense::Eq => act == r.rhs,
                    Sense::Le => act <= r.rhs,
                    Sense::Ge => act >= r.rhs,
                }
            })
    }

    pub fn objective(&self, x: &[i64]) -> i64 {
        self.vars.iter().zip(x).map(|(v, &x)| v.cost * x).sum()
    }
}

pub const DEFAULT_MAX_NODES: u64 = 50_000_000;

struct Search<'a> {
    p: &'a NFoldProgram,
    in_choice: Vec<bool>,
    best: Option<(i64, Vec<i64>)>,
    cutoff: Option<i64>,
    nodes: u64,
    max_nodes: u64,
}

fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

impl Search<'_> {
    /// Tightens bounds to a fixpoint; false on infeasibility.
    fn propagate(&self, lo: &mut [i64], hi: &mut [i64]) -> bool {
        loop {
            let mut changed = false;
            for r in &self.p.rows {
                let (mut min_act, mut max_act) = (0i64, 0i64);
                for &(i, a) in &r.coeffs {
                    if a > 0 {
                        min_act += a * lo[i];
                        max_act += a * hi[i];
                    } else {
                        min_act += a * hi[i];
                        max_act += a * lo[i];
                    }
                }
                let upper = matches!(r.sense, Sense::Eq | Sense::Le);
                let lower = matches!(r.sense, Sense::Eq | Sense::Ge);
                if (upper && min_act > r.rhs) || (lower && max_act < r.rhs) {
                    return false;
                }
                for &(i, a) in &r.coeffs {
                    if a == 0 {
                        continue;
                    }
                    let (own_min, own_max) = if a > 0 { (a * lo[i], a * hi[i]) } else { (a * hi[i], a * lo[i]) };
                    if upper {
                        // a x <= rhs - (min_act - own_min)
                        let slack = r.rhs - (min_act - own_min);
                        if a > 0 {
                            let nb = div_floor(slack, a);
                            if nb < hi[i] {
                                hi[i] = nb;
                                changed = true;
                            }
                        } else {
                            let nb = div_ceil(slack, a);
                            if nb > lo[i] {
                                lo[i] = nb;
                                changed = true;
                            }
                        }
                    }
                    if lower {
                        // a x >= rhs - (max_act - own_max)
                        let need = r.rhs - (max_act - own_max);
                        if a > 0 {
                            let nb = div_ceil(need, a);
                            if nb > lo[i] {
                                lo[i] = nb;
                                changed = true;
                            }
                        } else {
                            let nb = div_floor(need, a);
                            if nb < hi[i] {
                                hi[i] = nb;
                                changed = true;
                            }
                        }
                    }
                    if lo[i] > hi[i] {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn bound(&self, lo: &[i64], hi: &[i64]) -> Option<i64> {
        let mut b = 0;
        for (i, v) in self.p.vars.iter().enumerate() {
            if !self.in_choice[i] {
                b += (v.cost * lo[i]).min(v.cost * hi[i]);
            }
        }
        for r in self.p.rows.iter().filter(|r| r.choice) {
            let fixed = r.coeffs.iter().find(|&&(i, _)| lo[i] == 1);
            let c = match fixed {
                Some(&(i, _)) => self.p.vars[i].cost,
                None => r.coeffs.iter().filter(|&&(i, _)| hi[i] >= 1).map(|&(i, _)| self.p.vars[i].cost).min()?,
            };
            b += c;
        }
        Some(b)
    }

    fn beaten(&self, b: i64) -> bool {
        self.best.as_ref().is_some_and(|x| b >= x.0) || self.cutoff.is_some_and(|c| b >= c)
    }

    fn dfs(&mut self, mut lo: Vec<i64>, mut hi: Vec<i64>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::TooLarge(format!("more than {} branch-and-bound nodes", self.max_nodes)));
        }
        if !self.propagate(&mut lo, &mut hi) {
            return Ok(());
        }
        let Some(b) = self.bound(&lo, &hi) else { return Ok(()) };
        if self.beaten(b) {
            return Ok(());
        }
        let Some(i) = (0..lo.len()).find(|&i| lo[i] < hi[i]) else {
            debug_assert!(self.p.is_feasible(&lo));
            self.best = Some((self.p.objective(&lo), lo));
            return Ok(());
        };
        let values: Vec<i64> = if self.p.vars[i].cost >= 0 {
            (lo[i]..=hi[i]).collect()
        } else {
            (lo[i]..=hi[i]).rev().collect()
        };
        for val in values {
            let (mut l, mut h) = (lo.clone(), hi.clone());
            l[i] = val;
            h[i] = val;
            self.dfs(l, h)?;
        }
        Ok(())
    }
}

/// Optimal assignment of a finite-box program, or `None` if infeasible.
/// With `cutoff`, only solutions strictly cheaper than it are reported.
pub fn solve_nfold(p: &NFoldProgram, cutoff: Option<i64>, max_nodes: u64) -> Result<Option<(i64, Vec<i64>)>> {
    let mut in_choice = vec![false; p.vars.len()];
    for r in p.rows.iter().filter(|r| r.choice) {
        for &(i, _) in &r.coeffs {
            in_choice[i] = true;
        }
    }
    let mut s = Search { p, in_choice, best: None, cutoff, nodes: 0, max_nodes };
    let lo = p.vars.iter().map(|v| v.lo).collect();
    let hi = p.vars.iter().map(|v| v.hi).collect();
    s.dfs(lo, hi)?;
    Ok(s.best)
}
