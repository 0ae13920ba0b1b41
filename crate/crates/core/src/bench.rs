//! Wall-clock harness for the 1-D solver on synthetic instances.
//!
//! Each record times sorting plus solving on one freshly generated
//! instance with `m = n + extra_targets`. The instance depends only on the
//! seed, `n`, and the repeat index, so every `λ` sees the same data.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::{gaussian_mixture_raw, uniform_raw};
use crate::solver::{solve, SolverConfig};
use crate::types::SortedSamples;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// `x ~ U[-20, 20]`, `y ~ U[-40, 40]`.
    Uniform,
    /// Five- and six-component unit-variance normal mixtures.
    GaussianMixture,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::Uniform => "uniform",
            Generator::GaussianMixture => "gaussian-mixture",
        }
    }

    /// The two penalties used with this family.
    pub fn default_lambdas(self) -> [f64; 2] {
        match self {
            Generator::Uniform => [20.0, 100.0],
            Generator::GaussianMixture => [2.0, 10.0],
        }
    }

    pub fn sample(self, n: usize, m: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Generator::Uniform => uniform_raw(n, m, (-20.0, 20.0), (-40.0, 40.0), seed)
                .expect("fixed ranges are valid"),
            Generator::GaussianMixture => gaussian_mixture_raw(n, m, seed),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Generator::Uniform),
            "gaussian-mixture" | "mixture" => Ok(Generator::GaussianMixture),
            other => Err(Error::InvalidArgument(format!(
                "unknown generator {other:?} (expected uniform or gaussian-mixture)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub generator: Generator,
    pub sizes: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub repeats: usize,
    pub extra_targets: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(generator: Generator, sizes: Vec<usize>, repeats: usize, seed: u64) -> Self {
        Self {
            generator,
            sizes,
            lambdas: generator.default_lambdas().to_vec(),
            repeats,
            extra_targets: 1000,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub generator: Generator,
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub repeat: usize,
    pub seconds: f64,
    pub value: f64,
    /// `ok`, or the error message of a failed repeat.
    pub status: String,
}

impl BenchRecord {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Column order of [`write_csv`].
pub const CSV_HEADER: &str = "generator,n,m,lambda,repeat,seconds,value,status";

fn instance_seed(seed: u64, n: usize, repeat: usize) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (repeat as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
}

fn time_one(x: Vec<f64>, y: Vec<f64>, lambda: f64) -> (f64, Result<f64>) {
    let start = Instant::now();
    let result = (|| {
        let (xs, _) = SortedSamples::from_unsorted(x)?;
        let (ys, _) = SortedSamples::from_unsorted(y)?;
        Ok(solve(&xs, &ys, &SolverConfig::new(lambda))?.value)
    })();
    (start.elapsed().as_secs_f64(), result)
}

/// Runs every `(n, λ, repeat)` cell sequentially; failures are recorded,
/// not raised.
pub fn run_bench(config: &BenchConfig) -> Vec<BenchRecord> {
    let mut records = Vec::new();
    for &n in &config.sizes {
        let m = n + config.extra_targets;
        for repeat in 0..config.repeats {
            let (x, y) = config
                .generator
                .sample(n, m, instance_seed(config.seed, n, repeat));
            for &lambda in &config.lambdas {
                let (seconds, result) = time_one(x.clone(), y.clone(), lambda);
                let (value, status) = match result {
                    Ok(v) => (v, "ok".to_string()),
                    Err(e) => (f64::NAN, e.to_string()),
                };
                records.push(BenchRecord {
                    generator: config.generator,
                    n,
                    m,
                    lambda,
                    repeat,
                    seconds: seconds.max(f64::MIN_POSITIVE),
                    value,
                    status,
                });
            }
        }
    }
    records
}

pub fn write_csv<W: Write>(mut w: W, records: &[BenchRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{:.9},{},{}",
            r.generator,
            r.n,
            r.m,
            r.lambda,
            r.repeat,
            r.seconds,
            r.value,
            r.status.replace([',', '\n'], ";")
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MedianTime {
    pub lambda: f64,
    pub n: usize,
    pub seconds: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Median time over successful repeats for each `(λ, n)` cell, ordered by
/// first appearance.
pub fn median_times(records: &[BenchRecord]) -> Vec<MedianTime> {
    let mut cells: Vec<(f64, usize, Vec<f64>)> = Vec::new();
    for r in records.iter().filter(|r| r.ok()) {
        match cells.iter_mut().find(|c| c.0 == r.lambda && c.1 == r.n) {
            Some(c) => c.2.push(r.seconds),
            None => cells.push((r.lambda, r.n, vec![r.seconds])),
        }
    }
    cells
        .into_iter()
        .map(|(lambda, n, times)| MedianTime {
            lambda,
            n,
            seconds: median(times),
        })
        .collect()
}

/// Least-squares slope of `ln t` against `ln n`.
pub fn loglog_slope(points: &[(usize, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "a slope needs at least two sizes".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all sizes are equal".into()));
    }
    Ok(sxy / sxx)
}

/// Slope for one `λ` from the median times.
pub fn slope_for(medians: &[MedianTime], lambda: f64) -> Result<f64> {
    let pts: Vec<(usize, f64)> = medians
        .iter()
        .filter(|m| m.lambda == lambda)
        .map(|m| (m.n, m.seconds))
        .collect();
    loglog_slope(&pts)
}
