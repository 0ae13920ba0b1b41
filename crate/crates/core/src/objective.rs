//! Primal objective of the empirical partial transport problem.

use crate::error::{Error, Result};
use crate::types::{CostSpec, PartialPlan};

/// Primal cost of a plan: transport cost on matched pairs plus `λ` for every
/// destroyed source and every created target,
/// `Σ_{i∈dom L} c(x_i, y_L[i]) + λ (n + m − 2|dom L|)`.
pub fn eval_plan_cost(
    x: &[f64],
    y: &[f64],
    plan: &PartialPlan,
    lambda: f64,
    cost: CostSpec,
) -> Result<f64> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidPenalty(format!(
            "penalty must be finite and non-negative, got {lambda}"
        )));
    }
    plan.validate(x.len(), y.len())?;
    let transport: f64 = plan.pairs().map(|(i, j)| cost.eval(x[i], y[j])).sum();
    let unmatched = (x.len() + y.len() - 2 * plan.matched()) as f64;
    Ok(transport + lambda * unmatched)
}

/// Transport cost of a plan without penalty terms.
pub fn transport_cost(x: &[f64], y: &[f64], plan: &PartialPlan, cost: CostSpec) -> f64 {
    plan.pairs().map(|(i, j)| cost.eval(x[i], y[j])).sum()
}

/// Converts the symmetric value `OPT_λ` with `λ = (λ1 + λ2) / 2` into the
/// asymmetric value `OPT_{λ1,λ2}` where destroying source mass costs `λ1` and
/// creating target mass costs `λ2`.
pub fn symmetric_shift(value_sym: f64, lambda1: f64, lambda2: f64, n: usize, m: usize) -> f64 {
    let half = (lambda1 - lambda2) / 2.0;
    value_sym + half * n as f64 - half * m as f64
}
