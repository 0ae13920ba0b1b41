//! Slow, independent reference solvers used to validate [`crate::solver`].
//!
//! None of these share code with the primal-dual solver:
//!
//! - [`oracle_enumerate`] walks every strictly increasing partial map.
//! - [`oracle_dp`] runs an alignment-style dynamic program on the shifted
//!   cost `c − 2λ`.
//! - [`oracle_extended_balanced`] adds one reservoir point per opposite
//!   sample and solves the resulting square assignment problem exactly.
//! - [`oracle_dp_full`] is the no-destruction dynamic program for the
//!   `λ1 = ∞` mode.

mod assignment;
mod dp;
mod enumerate;
mod extended;

pub use assignment::solve_assignment;
pub use dp::{oracle_dp, oracle_dp_full, DP_CELL_LIMIT};
pub use enumerate::{oracle_enumerate, ENUMERATION_LIMIT};
pub use extended::{oracle_extended_balanced, EXTENDED_SIZE_LIMIT};

use crate::types::PartialPlan;

/// Optimal value together with one optimal plan.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub plan: PartialPlan,
}
