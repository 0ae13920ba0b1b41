//! Exact primal-dual solver for one-dimensional optimal partial transport.
//!
//! Given sorted `x` (n points) and `y` (m points) with unit masses, finds a
//! strictly increasing partial map `L` minimising
//! `Σ_{i∈dom L} |x_i − y_L[i]|^p + λ (n + m − 2|dom L|)`, together with dual
//! potentials `(Φ, Ψ)` certifying optimality. Worst case `O(n · max(n, m))`,
//! typically close to linear.
//!
//! ```
//! use sopt::{solve, SolverConfig, SortedSamples};
//!
//! let x = SortedSamples::new(vec![0.0, 3.0]).unwrap();
//! let y = SortedSamples::new(vec![1.0]).unwrap();
//! let sol = solve(&x, &y, &SolverConfig::new(2.0)).unwrap();
//! assert_eq!(sol.value, 3.0);
//! assert_eq!(sol.plan.assignment(), &[Some(0), None]);
//! ```

mod engine;
mod invariants;
mod verify;

pub use verify::{verify_optimality, Check, OptimalityReport, VERIFY_TOLERANCE};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::objective::transport_cost;
use crate::types::{CostSpec, DualPair, PartialPlan, Solution, SortedSamples};
use engine::Engine;

/// Default absolute tolerance for the solver's equality tests.
pub const DEFAULT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Cost of destroying or creating one unit of mass. Must be finite; use
    /// [`solve_pot`] for the `λ = ∞` mode.
    pub lambda: f64,
    pub cost: CostSpec,
    pub eps: f64,
    /// Check invariants after every insertion (slow, `O(nm)` per point).
    pub debug_invariants: bool,
}

impl SolverConfig {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            cost: CostSpec::default(),
            eps: DEFAULT_EPS,
            debug_invariants: false,
        }
    }

    pub fn with_cost(mut self, cost: CostSpec) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_debug_invariants(mut self, on: bool) -> Self {
        self.debug_invariants = on;
        self
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be finite and non-negative, got {eps}"
        )));
    }
    Ok(())
}

/// Solves `OPT_λ(x, y)` for sorted inputs.
pub fn solve(x: &SortedSamples, y: &SortedSamples, config: &SolverConfig) -> Result<Solution> {
    let lambda = config.lambda;
    if lambda == f64::INFINITY {
        return Err(Error::InvalidPenalty(
            "λ = +∞ is the full-transport mode; use solve_pot".into(),
        ));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidPenalty(format!(
            "penalty must be finite and non-negative, got {lambda}"
        )));
    }
    check_eps(config.eps)?;
    let out = Engine::new(
        x,
        y,
        config.cost,
        lambda,
        lambda,
        config.eps,
        config.debug_invariants,
    )
    .run()?;
    let plan = PartialPlan::new(out.assign);
    let unmatched = (x.len() + y.len() - 2 * plan.matched()) as f64;
    let value = transport_cost(x, y, &plan, config.cost) + lambda * unmatched;
    Ok(Solution {
        plan,
        duals: DualPair {
            phi: out.phi,
            psi: out.psi,
        },
        value,
        stats: out.stats,
    })
}

/// Validating wrapper over raw slices that must already be sorted.
pub fn solve_sorted_slices(x: &[f64], y: &[f64], config: &SolverConfig) -> Result<Solution> {
    let x = SortedSamples::new(x.to_vec())?;
    let y = SortedSamples::new(y.to_vec())?;
    solve(&x, &y, config)
}

/// Configuration for the full-transport mode (`λ1 = ∞`): no source mass may
/// be destroyed, and each unused target is charged `target_penalty`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotConfig {
    pub target_penalty: f64,
    pub cost: CostSpec,
    pub eps: f64,
    pub debug_invariants: bool,
    /// When `n > m`, solve the mirrored problem (all targets transported)
    /// instead of failing.
    pub allow_flip: bool,
}

impl PotConfig {
    pub fn new(target_penalty: f64) -> Self {
        Self {
            target_penalty,
            cost: CostSpec::default(),
            eps: DEFAULT_EPS,
            debug_invariants: false,
            allow_flip: false,
        }
    }

    pub fn with_cost(mut self, cost: CostSpec) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_flip(mut self, allow: bool) -> Self {
        self.allow_flip = allow;
        self
    }

    pub fn with_debug_invariants(mut self, on: bool) -> Self {
        self.debug_invariants = on;
        self
    }
}

/// Full-transport solve: every point of the smaller side is matched.
///
/// The reported value is `Σ c` over matches plus `target_penalty · |m − n|`.
/// Potentials of the larger side start at `target_penalty`, the only place
/// a finite penalty enters the algorithm.
pub fn solve_pot(x: &SortedSamples, y: &SortedSamples, config: &PotConfig) -> Result<Solution> {
    let penalty = config.target_penalty;
    if !penalty.is_finite() {
        return Err(Error::InvalidPenalty(format!(
            "the finite-side penalty must be finite, got {penalty}"
        )));
    }
    check_eps(config.eps)?;
    let (n, m) = (x.len(), y.len());
    let flipped = n > m;
    if flipped && !config.allow_flip {
        return Err(Error::InvalidArgument(format!(
            "full transport of every source needs n <= m, got n = {n}, m = {m}"
        )));
    }
    let (src, tgt) = if flipped { (y, x) } else { (x, y) };
    let out = Engine::new(
        src,
        tgt,
        config.cost,
        f64::INFINITY,
        penalty,
        config.eps,
        config.debug_invariants,
    )
    .run()?;

    let (assignment, duals) = if flipped {
        let mut assignment = vec![None; n];
        for (j, a) in out.assign.iter().enumerate() {
            if let Some(i) = *a {
                assignment[i] = Some(j);
            }
        }
        (
            assignment,
            DualPair {
                phi: out.psi,
                psi: out.phi,
            },
        )
    } else {
        (
            out.assign,
            DualPair {
                phi: out.phi,
                psi: out.psi,
            },
        )
    };
    let plan = PartialPlan::new(assignment);
    let value = transport_cost(x, y, &plan, config.cost) + penalty * n.abs_diff(m) as f64;
    Ok(Solution {
        plan,
        duals,
        value,
        stats: out.stats,
    })
}

/// Solution expressed in the caller's original (unsorted) index order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnsortedSolution {
    /// `assignment[i] = Some(j)`: the `i`-th input source goes to the `j`-th
    /// input target.
    pub assignment: Vec<Option<usize>>,
    pub duals: DualPair,
    pub value: f64,
    /// The solution on the sorted problem.
    pub sorted: Solution,
    pub x_sorted: SortedSamples,
    pub y_sorted: SortedSamples,
    /// `x_sorted[r] == x[x_perm[r]]`.
    pub x_perm: Vec<usize>,
    pub y_perm: Vec<usize>,
}

/// Sorts both inputs, solves, and maps the plan and duals back to the input
/// order.
pub fn solve_unsorted(x: &[f64], y: &[f64], config: &SolverConfig) -> Result<UnsortedSolution> {
    let (xs, x_perm) = SortedSamples::from_unsorted(x.to_vec())?;
    let (ys, y_perm) = SortedSamples::from_unsorted(y.to_vec())?;
    let sorted = solve(&xs, &ys, config)?;
    let mut assignment = vec![None; x.len()];
    let mut phi = vec![0.0; x.len()];
    let mut psi = vec![0.0; y.len()];
    for (r, &i) in x_perm.iter().enumerate() {
        assignment[i] = sorted.plan.get(r).map(|j| y_perm[j]);
        phi[i] = sorted.duals.phi[r];
    }
    for (r, &j) in y_perm.iter().enumerate() {
        psi[j] = sorted.duals.psi[r];
    }
    Ok(UnsortedSolution {
        assignment,
        duals: DualPair { phi, psi },
        value: sorted.value,
        sorted,
        x_sorted: xs,
        y_sorted: ys,
        x_perm,
        y_perm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> SortedSamples {
        SortedSamples::new(v.to_vec()).unwrap()
    }

    fn dbg(lambda: f64) -> SolverConfig {
        SolverConfig::new(lambda).with_debug_invariants(true)
    }

    #[test]
    fn identical_supports() {
        let x = s(&[0.0, 1.0, 2.0]);
        let sol = solve(&x, &x, &dbg(1.0)).unwrap();
        assert_eq!(sol.value, 0.0);
        assert_eq!(sol.plan.assignment(), &[Some(0), Some(1), Some(2)]);
        for (i, j) in sol.plan.pairs() {
            assert_eq!(sol.duals.phi[i] + sol.duals.psi[j], 0.0);
        }
    }

    #[test]
    fn zero_penalty_gives_zero() {
        let sol = solve(&s(&[0.0, 0.5, 9.0]), &s(&[-3.0, 0.5]), &dbg(0.0)).unwrap();
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn small_partial_example() {
        let sol = solve(&s(&[0.0, 3.0]), &s(&[1.0]), &dbg(2.0)).unwrap();
        assert_eq!(sol.value, 3.0);
        assert_eq!(sol.plan.assignment(), &[Some(0), None]);
    }

    #[test]
    fn empty_sides() {
        let sol = solve(&s(&[]), &s(&[1.0, 2.0]), &dbg(1.5)).unwrap();
        assert_eq!(sol.value, 3.0);
        let sol = solve(&s(&[1.0, 2.0]), &s(&[]), &dbg(1.5)).unwrap();
        assert_eq!(sol.value, 3.0);
        assert_eq!(sol.duals.phi, vec![1.5, 1.5]);
    }

    #[test]
    fn rejects_bad_penalties() {
        let x = s(&[0.0]);
        assert!(solve(&x, &x, &SolverConfig::new(f64::INFINITY)).is_err());
        assert!(solve(&x, &x, &SolverConfig::new(-1.0)).is_err());
        assert!(solve(&x, &x, &SolverConfig::new(f64::NAN)).is_err());
        assert!(solve_sorted_slices(&[1.0, 0.0], &[0.0], &SolverConfig::new(1.0)).is_err());
        assert!(solve_sorted_slices(&[f64::NAN], &[0.0], &SolverConfig::new(1.0)).is_err());
    }

    #[test]
    fn conflict_chain_shifts_left() {
        // x_1 competes with x_0 for y_1; the chain slides onto y_0.
        let sol = solve(&s(&[1.0, 2.0]), &s(&[0.0, 1.9]), &dbg(100.0)).unwrap();
        assert_eq!(sol.plan.assignment(), &[Some(0), Some(1)]);
        assert!((sol.value - (1.0 + 0.01)).abs() < 1e-12);
        assert!(sol.stats.conflicts >= 1);
    }

    #[test]
    fn all_duplicates() {
        let x = s(&[2.0; 5]);
        let y = s(&[2.0; 3]);
        let sol = solve(&x, &y, &dbg(0.7)).unwrap();
        assert!((sol.value - 0.7 * 2.0).abs() < 1e-12);
        assert_eq!(sol.plan.matched(), 3);
    }

    #[test]
    fn pot_examples() {
        let sol = solve_pot(&s(&[0.0]), &s(&[0.0, 10.0]), &PotConfig::new(3.0)).unwrap();
        assert_eq!(sol.plan.assignment(), &[Some(0)]);
        assert_eq!(sol.value, 3.0);

        let x = s(&[-1.0, 0.0, 4.0]);
        let sol = solve_pot(&x, &x, &PotConfig::new(0.0).with_debug_invariants(true)).unwrap();
        assert_eq!(sol.plan.assignment(), &[Some(0), Some(1), Some(2)]);
        assert_eq!(sol.value, 0.0);

        let big = s(&[0.0, 1.0, 2.0]);
        let small = s(&[1.1]);
        assert!(solve_pot(&big, &small, &PotConfig::new(1.0)).is_err());
        let sol = solve_pot(&big, &small, &PotConfig::new(1.0).with_flip(true)).unwrap();
        assert_eq!(sol.plan.assignment(), &[None, Some(0), None]);
        assert!((sol.value - (0.01 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn unsorted_wrapper_maps_indices_back() {
        let x = [3.0, 0.0];
        let y = [1.0];
        let sol = solve_unsorted(&x, &y, &SolverConfig::new(2.0)).unwrap();
        assert_eq!(sol.value, 3.0);
        assert_eq!(sol.assignment, vec![None, Some(0)]);
        assert_eq!(sol.duals.phi[0], 2.0);
    }
}
