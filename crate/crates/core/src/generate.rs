//! Seeded synthetic instance generators for the runtime experiments.
//!
//! All generators use ChaCha8 seeded from a `u64`, so outputs are identical
//! across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::types::SortedSamples;

/// Number of mixture components used for the source / target families.
pub const SOURCE_COMPONENTS: usize = 5;
pub const TARGET_COMPONENTS: usize = 6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(range: (f64, f64)) -> Result<Uniform<f64>> {
    let (a, b) = range;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidArgument(format!(
            "uniform range [{a}, {b}] is empty or not finite"
        )));
    }
    Uniform::new(a, b).map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Unsorted i.i.d. uniform draws on each range.
pub fn uniform_raw(
    n: usize,
    m: usize,
    x_range: (f64, f64),
    y_range: (f64, f64),
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let ux = uniform(x_range)?;
    let uy = uniform(y_range)?;
    let mut rng = rng(seed);
    let x = (0..n).map(|_| ux.sample(&mut rng)).collect();
    let y = (0..m).map(|_| uy.sample(&mut rng)).collect();
    Ok((x, y))
}

/// Sorted i.i.d. uniform samples, e.g. `x ~ U[-20, 20]`, `y ~ U[-40, 40]`.
pub fn gen_uniform(
    n: usize,
    m: usize,
    x_range: (f64, f64),
    y_range: (f64, f64),
    seed: u64,
) -> Result<(SortedSamples, SortedSamples)> {
    let (x, y) = uniform_raw(n, m, x_range, y_range, seed)?;
    Ok((sorted(x), sorted(y)))
}

/// Draws from an equal-weight mixture of unit-variance normals centred at
/// `offset + 2k` for `k = 1..=components`, recording which component each
/// draw came from.
pub fn mixture_draws<R: Rng>(
    rng: &mut R,
    count: usize,
    components: usize,
    offset: f64,
) -> (Vec<f64>, Vec<usize>) {
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut values = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.random_range(1..=components);
        values.push(offset + 2.0 * k as f64 + unit.sample(rng));
        labels.push(k - 1);
    }
    (values, labels)
}

/// Unsorted mixture samples: `x ~ (1/5) Σ_k N(-4 + 2k, 1)` and
/// `y ~ (1/6) Σ_k N(-5 + 2k, 1)`.
pub fn gaussian_mixture_raw(n: usize, m: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng(seed);
    let (x, _) = mixture_draws(&mut rng, n, SOURCE_COMPONENTS, -4.0);
    let (y, _) = mixture_draws(&mut rng, m, TARGET_COMPONENTS, -5.0);
    (x, y)
}

/// Sorted Gaussian-mixture samples.
pub fn gen_gaussian_mixture(n: usize, m: usize, seed: u64) -> (SortedSamples, SortedSamples) {
    let (x, y) = gaussian_mixture_raw(n, m, seed);
    (sorted(x), sorted(y))
}

fn sorted(mut v: Vec<f64>) -> SortedSamples {
    v.sort_by(f64::total_cmp);
    SortedSamples::new(v).expect("generated samples are finite")
}
