use super::{solve_assignment, OracleResult};
use crate::error::{Error, Result};
use crate::types::{CostSpec, PartialPlan};

/// Largest `n + m` accepted by [`oracle_extended_balanced`].
pub const EXTENDED_SIZE_LIMIT: usize = 200;

/// `OPT_λ` through the balanced reformulation: each side is padded with one
/// reservoir point per point on the other side, giving an `(n+m) × (n+m)`
/// assignment problem with cost `c_ij − 2λ` on the real block and `0`
/// elsewhere. The optimum plus `λ (n + m)` equals `OPT_λ`; the restriction of
/// the optimal permutation to real pairs is an optimal plan.
pub fn oracle_extended_balanced(
    x: &[f64],
    y: &[f64],
    lambda: f64,
    cost: CostSpec,
) -> Result<OracleResult> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidPenalty(format!(
            "penalty must be finite and non-negative, got {lambda}"
        )));
    }
    let (n, m) = (x.len(), y.len());
    let size = n + m;
    if size > EXTENDED_SIZE_LIMIT {
        return Err(Error::SizeLimit(format!(
            "extended assignment supports n + m <= {EXTENDED_SIZE_LIMIT}, got {size}"
        )));
    }
    let mut matrix = vec![0.0f64; size * size];
    for i in 0..n {
        for j in 0..m {
            matrix[i * size + j] = cost.eval(x[i], y[j]) - 2.0 * lambda;
        }
    }
    let (total, row_to_col) = solve_assignment(&matrix, size);

    let assignment: Vec<Option<usize>> = row_to_col[..n]
        .iter()
        .map(|&j| (j < m).then_some(j))
        .collect();
    // Ties between equal-cost pairings may leave the restriction crossed;
    // the value is unaffected.
    Ok(OracleResult {
        value: total + lambda * size as f64,
        plan: PartialPlan::new(assignment),
    })
}
