//! Exact minimum condensing by branch-and-bound.
//!
//! * [`cover`]: minimum set cover by open nearest-enemy balls, which yields
//!   the smallest nearest-enemy-weighted condensed set.
//! * [`ip`]: the 0-1 program whose feasible points are the subsets that
//!   classify the whole sample correctly under the plain nearest-neighbor rule.
//!
//! Both solvers count branch nodes against a budget. Running out of budget
//! is reported as [`SolveStatus::BudgetExhausted`] together with the best
//! solution found so far.

pub mod cover;
pub mod ip;

use serde::Serialize;

use crate::classifier::CondensedSet;

pub use cover::{build_wnn_cover, exact_wnn_condense, CoverInstance};
pub use ip::{build_nn_ip, exact_nn_condense, IpConstraint, IpInstance};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// The node budget ran out; the solution is feasible but possibly not minimal.
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactSolution {
    pub set: CondensedSet,
    pub status: SolveStatus,
    pub nodes: u64,
}

impl ExactSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}
