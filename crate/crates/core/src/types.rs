//! Domain types shared by the solver, the oracles, and the applications.
//!
//! Indices are 0-based in code. A source point that is not transported is
//! represented by `None` in a [`PartialPlan`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-decreasing sequence of finite 1-D coordinates with unit mass each.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SortedSamples(Vec<f64>);

impl SortedSamples {
    /// Wraps `values`, rejecting non-finite or out-of-order entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        if let Some(index) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::Unsorted { index: index + 1 });
        }
        Ok(Self(values))
    }

    /// Sorts arbitrary values and returns the permutation `perm` with
    /// `sorted[r] == values[perm[r]]`.
    pub fn from_unsorted(values: Vec<f64>) -> Result<(Self, Vec<usize>)> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let mut perm: Vec<usize> = (0..values.len()).collect();
        perm.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted = perm.iter().map(|&i| values[i]).collect();
        Ok((Self(sorted), perm))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for SortedSamples {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Ground cost `c(a, b) = |a - b|^p` with `p > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    p: f64,
}

impl CostSpec {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Self { p })
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        if self.p == 2.0 {
            d * d
        } else {
            d.powf(self.p)
        }
    }
}

impl Default for CostSpec {
    fn default() -> Self {
        Self { p: 2.0 }
    }
}

/// Partial injection from source indices to target indices.
///
/// `assignment[i] == Some(j)` transports `x_i` onto `y_j`; `None` destroys
/// `x_i`. A valid plan is strictly increasing on its domain.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PartialPlan {
    assignment: Vec<Option<usize>>,
}

impl PartialPlan {
    pub fn new(assignment: Vec<Option<usize>>) -> Self {
        Self { assignment }
    }

    /// Plan of length `n` with every source point destroyed.
    pub fn empty(n: usize) -> Self {
        Self {
            assignment: vec![None; n],
        }
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<usize> {
        self.assignment.get(i).copied().flatten()
    }

    /// Number of transported source points, `|dom(L)|`.
    pub fn matched(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_some()).count()
    }

    /// Matched `(i, j)` pairs in increasing `i`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|j| (i, j)))
    }

    /// Source indices that are not transported.
    pub fn destroyed(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.is_none().then_some(i))
    }

    /// Inverse map over `m` targets.
    pub fn inverse(&self, m: usize) -> Vec<Option<usize>> {
        let mut inv = vec![None; m];
        for (i, j) in self.pairs() {
            if j < m {
                inv[j] = Some(i);
            }
        }
        inv
    }

    /// Checks length, index range, and strict monotonicity (which implies
    /// injectivity) against problem sizes `(n, m)`.
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.assignment.len() != n {
            return Err(Error::InvalidPlan(format!(
                "plan has length {} but there are {n} source points",
                self.assignment.len()
            )));
        }
        let mut prev: Option<(usize, usize)> = None;
        for (i, j) in self.pairs() {
            if j >= m {
                return Err(Error::InvalidPlan(format!(
                    "source {i} is mapped to target {j}, out of range for {m} targets"
                )));
            }
            if let Some((pi, pj)) = prev {
                if j <= pj {
                    return Err(Error::InvalidPlan(format!(
                        "plan is not strictly increasing: L[{pi}] = {pj} but L[{i}] = {j}"
                    )));
                }
            }
            prev = Some((i, j));
        }
        Ok(())
    }
}

/// Dual potentials: `phi` on the sources, `psi` on the targets.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DualPair {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

impl DualPair {
    /// `Σ min(Φ_i, λ) + Σ min(Ψ_j, λ)`.
    pub fn objective(&self, lambda: f64) -> f64 {
        self.phi.iter().map(|&p| p.min(lambda)).sum::<f64>()
            + self.psi.iter().map(|&p| p.min(lambda)).sum::<f64>()
    }
}

/// Operation counts collected during a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SolveStats {
    /// Main-loop iterations (one per source point).
    pub iterations: usize,
    /// Iterations of the conflict-resolution loop, summed over all conflicts.
    pub chain_steps: usize,
    pub destroyed_on_arrival: usize,
    pub direct_assignments: usize,
    pub conflicts: usize,
    pub duplicate_repairs: usize,
}

/// Optimal plan, optimal duals, and the primal value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub plan: PartialPlan,
    pub duals: DualPair,
    pub value: f64,
    pub stats: SolveStats,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_samples_validation() {
        assert!(SortedSamples::new(vec![0.0, 0.0, 1.0]).is_ok());
        assert!(matches!(
            SortedSamples::new(vec![0.0, 2.0, 1.0]),
            Err(Error::Unsorted { index: 2 })
        ));
        assert!(matches!(
            SortedSamples::new(vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn from_unsorted_returns_permutation() {
        let raw = vec![3.0, -1.0, 2.0, -1.0];
        let (s, perm) = SortedSamples::from_unsorted(raw.clone()).unwrap();
        assert_eq!(s.as_slice(), &[-1.0, -1.0, 2.0, 3.0]);
        for (r, &i) in perm.iter().enumerate() {
            assert_eq!(s[r], raw[i]);
        }
    }

    #[test]
    fn cost_rejects_p_one() {
        assert!(matches!(CostSpec::new(1.0), Err(Error::InvalidExponent(_))));
        assert!(CostSpec::new(1.5).is_ok());
        assert_eq!(CostSpec::default().eval(1.0, 4.0), 9.0);
        let c = CostSpec::new(3.0).unwrap();
        assert!((c.eval(-1.0, 1.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn plan_validation() {
        let ok = PartialPlan::new(vec![Some(0), None, Some(2)]);
        ok.validate(3, 3).unwrap();
        assert_eq!(ok.matched(), 2);
        assert_eq!(ok.inverse(3), vec![Some(0), None, Some(2)]);
        assert_eq!(ok.destroyed().collect::<Vec<_>>(), vec![1]);

        let crossed = PartialPlan::new(vec![Some(1), Some(0)]);
        assert!(crossed.validate(2, 2).is_err());
        let repeated = PartialPlan::new(vec![Some(1), Some(1)]);
        assert!(repeated.validate(2, 2).is_err());
        let out_of_range = PartialPlan::new(vec![Some(3)]);
        assert!(out_of_range.validate(1, 3).is_err());
        assert!(PartialPlan::empty(2).validate(3, 1).is_err());
    }
}
