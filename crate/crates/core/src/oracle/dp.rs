use super::OracleResult;
use crate::error::{Error, Result};
use crate::types::{CostSpec, PartialPlan};

/// Maximum number of table cells `(n + 1)(m + 1)` the dynamic programs allocate.
pub const DP_CELL_LIMIT: usize = 10_000_000;

fn check_cells(n: usize, m: usize) -> Result<()> {
    let cells = (n + 1).saturating_mul(m + 1);
    if cells > DP_CELL_LIMIT {
        return Err(Error::SizeLimit(format!(
            "dynamic program needs {cells} cells, limit is {DP_CELL_LIMIT}"
        )));
    }
    Ok(())
}

/// Exact `OPT_λ` by dynamic programming over monotone partial matchings.
///
/// `D[i][j] = min(D[i−1][j], D[i][j−1], D[i−1][j−1] + c_ij − 2λ)` with zero
/// boundary, so `D[n][m] + λ (n + m)` is the optimum. One optimal plan is
/// recovered by backtracking.
pub fn oracle_dp(x: &[f64], y: &[f64], lambda: f64, cost: CostSpec) -> Result<OracleResult> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidPenalty(format!(
            "penalty must be finite and non-negative, got {lambda}"
        )));
    }
    let (n, m) = (x.len(), y.len());
    check_cells(n, m)?;
    let w = m + 1;
    let mut table = vec![0.0f64; (n + 1) * w];
    for i in 1..=n {
        for j in 1..=m {
            let skip_x = table[(i - 1) * w + j];
            let skip_y = table[i * w + j - 1];
            let pair = table[(i - 1) * w + j - 1] + cost.eval(x[i - 1], y[j - 1]) - 2.0 * lambda;
            table[i * w + j] = skip_x.min(skip_y).min(pair);
        }
    }

    let mut assignment = vec![None; n];
    let (mut i, mut j) = (n, m);
    while i > 0 && j > 0 {
        let here = table[i * w + j];
        let pair = table[(i - 1) * w + j - 1] + cost.eval(x[i - 1], y[j - 1]) - 2.0 * lambda;
        if here == table[(i - 1) * w + j] {
            i -= 1;
        } else if here == table[i * w + j - 1] {
            j -= 1;
        } else {
            debug_assert_eq!(here, pair);
            assignment[i - 1] = Some(j - 1);
            i -= 1;
            j -= 1;
        }
    }

    Ok(OracleResult {
        value: table[n * w + m] + lambda * (n + m) as f64,
        plan: PartialPlan::new(assignment),
    })
}

/// Exact optimum when every source point must be transported (`λ1 = ∞`,
/// `n ≤ m`). Created targets are charged `target_penalty` each, so the
/// reported value is `min Σ c + target_penalty · (m − n)`.
///
/// `D[i][j] = min(D[i][j−1], D[i−1][j−1] + c_ij)` with `D[i][j] = ∞` for `j < i`.
pub fn oracle_dp_full(
    x: &[f64],
    y: &[f64],
    cost: CostSpec,
    target_penalty: f64,
) -> Result<OracleResult> {
    let (n, m) = (x.len(), y.len());
    if n > m {
        return Err(Error::InvalidArgument(format!(
            "full transport needs n <= m, got n = {n}, m = {m}"
        )));
    }
    check_cells(n, m)?;
    let w = m + 1;
    let mut table = vec![f64::INFINITY; (n + 1) * w];
    table[..w].fill(0.0);
    for i in 1..=n {
        for j in i..=m {
            let skip_y = table[i * w + j - 1];
            let pair = table[(i - 1) * w + j - 1] + cost.eval(x[i - 1], y[j - 1]);
            table[i * w + j] = skip_y.min(pair);
        }
    }

    let mut assignment = vec![None; n];
    let (mut i, mut j) = (n, m);
    while i > 0 {
        if j > i && table[i * w + j] == table[i * w + j - 1] {
            j -= 1;
        } else {
            assignment[i - 1] = Some(j - 1);
            i -= 1;
            j -= 1;
        }
    }

    Ok(OracleResult {
        value: table[n * w + m] + target_penalty * (m - n) as f64,
        plan: PartialPlan::new(assignment),
    })
}
