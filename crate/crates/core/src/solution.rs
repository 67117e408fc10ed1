use crate::instance::Instance;
use crate::walk::{validate_walk, ClosedWalk};

/// Solver result. Solvers minimize without regard to the budget; the budget
/// is applied afterwards, so `BudgetExceeded` still carries the optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Optimal { cost: u64, walk: ClosedWalk },
    Infeasible,
    BudgetExceeded { cost: u64, walk: ClosedWalk },
}

impl Solution {
    /// Wraps an unconstrained optimum, applying the instance budget.
    pub fn from_optimum(inst: &Instance, opt: Option<(u64, ClosedWalk)>) -> Solution {
        match opt {
            None => Solution::Infeasible,
            Some((cost, walk)) => match inst.budget() {
                Some(b) if cost > b => Solution::BudgetExceeded { cost, walk },
                _ => Solution::Optimal { cost, walk },
            },
        }
    }

    /// Optimal cost ignoring the budget, `None` when no walk exists.
    pub fn cost(&self) -> Option<u64> {
        match self {
            Solution::Optimal { cost, .. } | Solution::BudgetExceeded { cost, .. } => Some(*cost),
            Solution::Infeasible => None,
        }
    }

    pub fn walk(&self) -> Option<&ClosedWalk> {
        match self {
            Solution::Optimal { walk, .. } | Solution::BudgetExceeded { walk, .. } => Some(walk),
            Solution::Infeasible => None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, Solution::Optimal { .. })
    }

    /// True when the witness is a valid walk for the instance with the budget
    /// lifted and its cost matches the reported one.
    pub fn witness_ok(&self, inst: &Instance) -> bool {
        match self {
            Solution::Infeasible => true,
            Solution::Optimal { cost, walk } | Solution::BudgetExceeded { cost, walk } => {
                let r = validate_walk(&inst.with_budget(None), walk);
                r.valid && r.cost == *cost
            }
        }
    }
}
