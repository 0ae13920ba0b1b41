use super::OracleResult;
use crate::error::{Error, Result};
use crate::types::{CostSpec, PartialPlan};

/// Largest `n` or `m` accepted by [`oracle_enumerate`].
pub const ENUMERATION_LIMIT: usize = 14;

/// Exact minimum of `Σ c + λ1 (n − |dom|) + λ2 (m − |dom|)` over every strictly
/// increasing partial map, found by exhaustive search.
///
/// Each candidate corresponds to choosing equal-size index subsets of `x`
/// and `y` and pairing them in increasing order; the search visits each of
/// the `C(n + m, n)` candidates exactly once.
pub fn oracle_enumerate(
    x: &[f64],
    y: &[f64],
    lambda1: f64,
    lambda2: f64,
    cost: CostSpec,
) -> Result<OracleResult> {
    let (n, m) = (x.len(), y.len());
    if n > ENUMERATION_LIMIT || m > ENUMERATION_LIMIT {
        return Err(Error::SizeLimit(format!(
            "enumeration supports at most {ENUMERATION_LIMIT} points per side, got n = {n}, m = {m}"
        )));
    }
    for l in [lambda1, lambda2] {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::InvalidPenalty(format!(
                "penalties must be finite and non-negative, got {l}"
            )));
        }
    }
    let mut search = Search {
        x,
        y,
        lambda1,
        lambda2,
        cost,
        current: vec![None; n],
        best_value: f64::INFINITY,
        best: vec![None; n],
    };
    search.visit(0, 0, 0.0, 0);
    Ok(OracleResult {
        value: search.best_value,
        plan: PartialPlan::new(search.best),
    })
}

struct Search<'a> {
    x: &'a [f64],
    y: &'a [f64],
    lambda1: f64,
    lambda2: f64,
    cost: CostSpec,
    current: Vec<Option<usize>>,
    best_value: f64,
    best: Vec<Option<usize>>,
}

impl Search<'_> {
    fn visit(&mut self, i: usize, next_j: usize, transport: f64, matched: usize) {
        let (n, m) = (self.x.len(), self.y.len());
        if i == n {
            let value = transport
                + self.lambda1 * (n - matched) as f64
                + self.lambda2 * (m - matched) as f64;
            if value < self.best_value {
                self.best_value = value;
                self.best.clone_from(&self.current);
            }
            return;
        }
        self.current[i] = None;
        self.visit(i + 1, next_j, transport, matched);
        for j in next_j..m {
            self.current[i] = Some(j);
            let c = self.cost.eval(self.x[i], self.y[j]);
            self.visit(i + 1, j + 1, transport + c, matched + 1);
        }
        self.current[i] = None;
    }
}
