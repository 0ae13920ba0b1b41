//! Independent optimality certificate for a finite-`λ` solution.

use serde::Serialize;

use crate::objective::eval_plan_cost;
use crate::types::{CostSpec, Solution};

/// Relative tolerance used by [`verify_optimality`].
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// First violation found, empty on success.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityReport {
    pub checks: Vec<Check>,
    pub primal: f64,
    pub dual: f64,
}

impl OptimalityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn record(&mut self, name: &'static str, violation: Option<String>) {
        self.checks.push(Check {
            name,
            passed: violation.is_none(),
            detail: violation.unwrap_or_default(),
        });
    }
}

fn tol(mag: f64, rel: f64) -> f64 {
    rel * (1.0 + mag.abs())
}

/// Checks a solution against the primal-dual optimality conditions:
///
/// - `plan`: valid and strictly increasing (co-monotone matched pairs)
/// - `dual_feasibility`: `Φ_i + Ψ_j ≤ c_ij` for every pair
/// - `active_constraints`: equality on matched pairs
/// - `potential_bounds`: `Φ_i ≤ λ`, `Ψ_j ≤ λ`
/// - `source_marginal`, `target_marginal`: a potential below `λ` forces the
///   point to be matched
/// - `value`: the reported value equals the primal objective of the plan
/// - `strong_duality`: primal equals `Σ min(Φ_i, λ) + Σ min(Ψ_j, λ)`
/// - `truncation`: no matched pair costs more than `2λ`
///
/// All comparisons use tolerance `rel_tol · (1 + |magnitude|)`.
pub fn verify_optimality(
    x: &[f64],
    y: &[f64],
    solution: &Solution,
    lambda: f64,
    cost: CostSpec,
    rel_tol: f64,
) -> OptimalityReport {
    let (n, m) = (x.len(), y.len());
    let plan = &solution.plan;
    let phi = &solution.duals.phi;
    let psi = &solution.duals.psi;
    let mut rec = Recorder { checks: Vec::new() };

    let plan_ok = plan.validate(n, m);
    let shapes_ok = phi.len() == n && psi.len() == m;
    rec.record(
        "plan",
        match (&plan_ok, shapes_ok) {
            (Err(e), _) => Some(e.to_string()),
            (Ok(()), false) => Some(format!(
                "dual lengths ({}, {}) do not match sizes ({n}, {m})",
                phi.len(),
                psi.len()
            )),
            _ => None,
        },
    );
    if plan_ok.is_err() || !shapes_ok {
        return OptimalityReport {
            checks: rec.checks,
            primal: f64::NAN,
            dual: f64::NAN,
        };
    }

    let mut violation = None;
    'outer: for i in 0..n {
        for j in 0..m {
            let c = cost.eval(x[i], y[j]);
            if phi[i] + psi[j] > c + tol(c.max(lambda), rel_tol) {
                violation = Some(format!("Φ[{i}] + Ψ[{j}] = {} > c = {c}", phi[i] + psi[j]));
                break 'outer;
            }
        }
    }
    rec.record("dual_feasibility", violation);

    rec.record(
        "active_constraints",
        plan.pairs().find_map(|(i, j)| {
            let c = cost.eval(x[i], y[j]);
            let gap = (phi[i] + psi[j] - c).abs();
            (gap > tol(c.max(lambda), rel_tol)).then(|| format!("pair ({i}, {j}) has slack {gap}"))
        }),
    );

    let bound = tol(lambda, rel_tol);
    rec.record(
        "potential_bounds",
        phi.iter()
            .enumerate()
            .find(|(_, &p)| p > lambda + bound)
            .map(|(i, p)| format!("Φ[{i}] = {p} > λ"))
            .or_else(|| {
                psi.iter()
                    .enumerate()
                    .find(|(_, &p)| p > lambda + bound)
                    .map(|(j, p)| format!("Ψ[{j}] = {p} > λ"))
            }),
    );

    rec.record(
        "source_marginal",
        (0..n)
            .find(|&i| phi[i] < lambda - bound && plan.get(i).is_none())
            .map(|i| format!("Φ[{i}] = {} < λ but x_{i} is destroyed", phi[i])),
    );
    let inverse = plan.inverse(m);
    rec.record(
        "target_marginal",
        (0..m)
            .find(|&j| psi[j] < lambda - bound && inverse[j].is_none())
            .map(|j| format!("Ψ[{j}] = {} < λ but y_{j} is unused", psi[j])),
    );

    let primal = eval_plan_cost(x, y, plan, lambda, cost).unwrap_or(f64::NAN);
    let dual = solution.duals.objective(lambda);
    rec.record(
        "value",
        ((solution.value - primal).abs() > tol(primal, rel_tol))
            .then(|| format!("reported {} but plan costs {primal}", solution.value)),
    );
    rec.record(
        "strong_duality",
        ((primal - dual).abs() > tol(primal, rel_tol) || primal.is_nan())
            .then(|| format!("primal {primal} != dual {dual}")),
    );
    rec.record(
        "truncation",
        plan.pairs().find_map(|(i, j)| {
            let c = cost.eval(x[i], y[j]);
            (c > 2.0 * lambda + tol(lambda, rel_tol))
                .then(|| format!("pair ({i}, {j}) costs {c} > 2λ"))
        }),
    );

    OptimalityReport {
        checks: rec.checks,
        primal,
        dual,
    }
}
