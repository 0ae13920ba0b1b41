//! Sliced optimal partial transport between point clouds.
//!
//! Both clouds are projected on random unit directions; each pair of
//! projections is solved exactly in one dimension and the slice values are
//! averaged.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::rng;
use crate::solver::{solve, SolverConfig};
use crate::types::{CostSpec, SortedSamples};

/// `n` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "point dimension must be >= 1".into(),
            ));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn point_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Points with the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointCloud {
            dim: self.dim,
            coords,
        }
    }

    /// Concatenation of two clouds of equal dimension.
    pub fn concat(&self, other: &PointCloud) -> Result<PointCloud> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointCloud {
            dim: self.dim,
            coords,
        })
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.points() {
            for (a, b) in c.iter_mut().zip(p) {
                *a += b;
            }
        }
        let n = self.len().max(1) as f64;
        c.iter_mut().for_each(|a| *a /= n);
        c
    }

    /// Raw (unsorted) dot products with `theta`.
    pub fn dot(&self, theta: &[f64]) -> Vec<f64> {
        self.points()
            .map(|p| p.iter().zip(theta).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `N` unit directions in `R^d`, drawn uniformly from the sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionSet {
    dim: usize,
    seed: u64,
    dirs: Vec<f64>,
}

impl DirectionSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.dirs.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn get(&self, l: usize) -> &[f64] {
        &self.dirs[l * self.dim..(l + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.dirs.chunks_exact(self.dim)
    }
}

/// Samples `count` i.i.d. uniform directions by normalising standard normal
/// vectors. Deterministic per seed.
pub fn sample_directions(dim: usize, count: usize, seed: u64) -> Result<DirectionSet> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "direction dimension must be >= 1".into(),
        ));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one direction".into()));
    }
    let mut rng = rng(seed);
    let mut dirs = Vec::with_capacity(dim * count);
    let mut v = vec![0.0f64; dim];
    for _ in 0..count {
        loop {
            v.iter_mut().for_each(|a| *a = rng.sample(StandardNormal));
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-12 {
                dirs.extend(v.iter().map(|a| a / norm));
                break;
            }
        }
    }
    Ok(DirectionSet { dim, seed, dirs })
}

/// A cloud projected on one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub values: SortedSamples,
    /// `values[r]` is the projection of point `perm[r]`.
    pub perm: Vec<usize>,
}

pub fn project(cloud: &PointCloud, theta: &[f64]) -> Result<Projection> {
    if theta.len() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            got: theta.len(),
        });
    }
    let (values, perm) = SortedSamples::from_unsorted(cloud.dot(theta))?;
    Ok(Projection { values, perm })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoptEstimate {
    /// Average of the slice values.
    pub value: f64,
    pub per_slice: Vec<f64>,
    exponent: f64,
}

impl SoptEstimate {
    /// `value^{1/p}`, the metric form.
    pub fn metric(&self) -> f64 {
        self.value.max(0.0).powf(1.0 / self.exponent)
    }
}

fn check_pair(x: &PointCloud, y: &PointCloud, lambda: f64) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidPenalty(format!(
            "sliced transport needs a finite λ > 0, got {lambda}"
        )));
    }
    Ok(())
}

/// One-dimensional `OPT_λ` between the projections of `x` and `y` on `theta`.
pub fn slice_value(
    x: &PointCloud,
    y: &PointCloud,
    theta: &[f64],
    lambda: f64,
    cost: CostSpec,
) -> Result<f64> {
    let px = project(x, theta)?;
    let py = project(y, theta)?;
    let cfg = SolverConfig::new(lambda).with_cost(cost);
    Ok(solve(&px.values, &py.values, &cfg)?.value)
}

/// Monte-Carlo sliced OPT with `count` fresh directions drawn from `seed`.
pub fn sopt_estimate(
    x: &PointCloud,
    y: &PointCloud,
    lambda: f64,
    count: usize,
    seed: u64,
    cost: CostSpec,
) -> Result<SoptEstimate> {
    check_pair(x, y, lambda)?;
    let dirs = sample_directions(x.dim(), count, seed)?;
    sopt_with_directions(x, y, lambda, &dirs, cost)
}

/// Sliced OPT over a fixed direction set. Slices run in parallel; the
/// average is accumulated in slice order, so the result does not depend on
/// the thread count.
pub fn sopt_with_directions(
    x: &PointCloud,
    y: &PointCloud,
    lambda: f64,
    dirs: &DirectionSet,
    cost: CostSpec,
) -> Result<SoptEstimate> {
    check_pair(x, y, lambda)?;
    if dirs.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: dirs.dim(),
        });
    }
    let per_slice = (0..dirs.len())
        .into_par_iter()
        .map(|l| slice_value(x, y, dirs.get(l), lambda, cost))
        .collect::<Result<Vec<f64>>>()?;
    let value = per_slice.iter().sum::<f64>() / per_slice.len() as f64;
    Ok(SoptEstimate {
        value,
        per_slice,
        exponent: cost.exponent(),
    })
}

/// Per-point moves from one slice of the 1-D plan.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceDisplacement {
    /// Row-major `n × d`; zero rows for unmatched points.
    pub displacement: Vec<f64>,
    /// Matched `(source, target)` pairs in original indices, by source.
    pub matches: Vec<(usize, usize)>,
}

impl SliceDisplacement {
    /// Matched source indices, ascending.
    pub fn domain(&self) -> Vec<usize> {
        self.matches.iter().map(|&(i, _)| i).collect()
    }

    pub fn apply(&self, cloud: &mut PointCloud) {
        for (c, d) in cloud.coords.iter_mut().zip(&self.displacement) {
            *c += d;
        }
    }
}

/// Moves each matched source point along `theta` so that its projection
/// lands on its target's projection: `(θᵀy_L[i] − θᵀx_i) θ`.
pub fn sopt_slice_displacement(
    x_hat: &PointCloud,
    y: &PointCloud,
    theta: &[f64],
    lambda: f64,
    cost: CostSpec,
) -> Result<SliceDisplacement> {
    check_pair(x_hat, y, lambda)?;
    let px = project(x_hat, theta)?;
    let py = project(y, theta)?;
    let cfg = SolverConfig::new(lambda).with_cost(cost);
    let sol = solve(&px.values, &py.values, &cfg)?;

    let d = x_hat.dim();
    let mut displacement = vec![0.0; x_hat.len() * d];
    let mut matches = Vec::with_capacity(sol.plan.matched());
    for (r, s) in sol.plan.pairs() {
        let i = px.perm[r];
        let j = py.perm[s];
        let shift = py.values[s] - px.values[r];
        for (k, t) in theta.iter().enumerate() {
            displacement[i * d + k] = shift * t;
        }
        matches.push((i, j));
    }
    matches.sort_unstable();
    Ok(SliceDisplacement {
        displacement,
        matches,
    })
}
