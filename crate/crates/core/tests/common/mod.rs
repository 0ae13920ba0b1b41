#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sorted values either continuous on [-lo, lo] or drawn from a coarse
/// integer grid so that duplicates are frequent.
pub fn sorted_values(rng: &mut ChaCha8Rng, len: usize, grid: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len)
        .map(|_| {
            if grid {
                rng.random_range(-3i32..=3) as f64
            } else {
                rng.random_range(-5.0..5.0)
            }
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Instance with sizes in `0..=max_len`; roughly one in three uses the
/// duplicate-heavy grid.
pub fn instance(rng: &mut ChaCha8Rng, max_len: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rng.random_range(0..=max_len);
    let m = rng.random_range(0..=max_len);
    let grid = rng.random_range(0..3) == 0;
    (sorted_values(rng, n, grid), sorted_values(rng, m, grid))
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}
