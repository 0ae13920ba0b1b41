use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use serde::{Deserialize, Serialize};
use sopt::bench::{median_times, run_bench, slope_for, write_csv, BenchConfig, Generator};
use sopt::color::{color_transfer, ColorConfig, Image};
use sopt::io::{read_cloud_file, read_points_file};
use sopt::registration::{register, transform_error, RegistrationConfig, TraceEntry, Transform};
use sopt::sliced::sopt_estimate;
use sopt::solver::{solve_unsorted, verify_optimality, OptimalityReport, VERIFY_TOLERANCE};
use sopt::{CostSpec, Error, Result, SolverConfig};

use crate::Command;

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Opt1d {
            x,
            y,
            lambda,
            p,
            verify,
        } => opt1d(&x, &y, lambda, p, verify),
        Command::Bench {
            generator,
            sizes,
            lambdas,
            repeats,
            extra,
            seed,
            out,
        } => {
            let generator: Generator = generator.parse()?;
            let mut cfg = BenchConfig::new(generator, sizes, repeats, seed);
            if !lambdas.is_empty() {
                cfg.lambdas = lambdas;
            }
            cfg.extra_targets = extra;
            bench(&cfg, out.as_deref())
        }
        Command::Sopt {
            x,
            y,
            dim,
            lambda,
            slices,
            seed,
            p,
            per_slice,
        } => sopt(&x, &y, dim, lambda, slices, seed, p, per_slice.as_deref()),
        Command::Register {
            x,
            y,
            clean,
            iterations,
            seed,
            lambda0,
            truth,
            trace,
        } => {
            let mut cfg = RegistrationConfig::new(clean, iterations, seed);
            cfg.lambda0 = lambda0;
            registration(&x, &y, &cfg, truth.as_deref(), trace.as_deref())
        }
        Command::Color {
            source,
            target,
            out,
            lambda,
            k,
            target_k,
            iterations,
            kmeans_iters,
            seed,
        } => {
            let mut cfg = ColorConfig::new(lambda, seed);
            cfg.source_k = k;
            cfg.target_k = target_k.unwrap_or(k);
            cfg.iterations = iterations;
            cfg.kmeans_iters = kmeans_iters;
            color(&source, &target, &out, &cfg)
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidArgument(format!("cannot serialise output: {e}")))?;
    println!("{text}");
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Serialize)]
struct Opt1dOutput {
    value: f64,
    /// `[i, j]` pairs in input order, 0-based.
    matches: Vec<[usize; 2]>,
    destroyed: Vec<usize>,
    phi: Vec<f64>,
    psi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<OptimalityReport>,
}

fn opt1d(x: &Path, y: &Path, lambda: f64, p: f64, verify: bool) -> Result<ExitCode> {
    let xs = read_points_file(x)?;
    let ys = read_points_file(y)?;
    let cfg = SolverConfig::new(lambda).with_cost(CostSpec::new(p)?);
    let sol = solve_unsorted(&xs, &ys, &cfg)?;
    let verification = verify.then(|| {
        verify_optimality(
            &sol.x_sorted,
            &sol.y_sorted,
            &sol.sorted,
            lambda,
            cfg.cost,
            VERIFY_TOLERANCE,
        )
    });
    let failed = verification.as_ref().is_some_and(|r| !r.passed());
    let out = Opt1dOutput {
        value: sol.value,
        matches: sol
            .assignment
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|j| [i, j]))
            .collect(),
        destroyed: (0..xs.len())
            .filter(|&i| sol.assignment[i].is_none())
            .collect(),
        phi: sol.duals.phi,
        psi: sol.duals.psi,
        verification,
    };
    print_json(&out)?;
    if failed {
        eprintln!("optimality verification failed");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn bench(cfg: &BenchConfig, out: Option<&Path>) -> Result<ExitCode> {
    let records = run_bench(cfg);
    match out {
        Some(path) => write_csv(create(path)?, &records)?,
        None => write_csv(std::io::stdout().lock(), &records)?,
    }
    let medians = median_times(&records);
    for m in &medians {
        eprintln!("λ = {}, n = {}: median {:.6} s", m.lambda, m.n, m.seconds);
    }
    for &l in &cfg.lambdas {
        if let Ok(s) = slope_for(&medians, l) {
            eprintln!("λ = {l}: log-log slope {s:.3}");
        }
    }
    let failed = records.iter().filter(|r| !r.ok()).count();
    if failed > 0 {
        eprintln!("{failed} repeats failed; see the status column");
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SoptOutput {
    value: f64,
    /// `value^{1/p}`.
    metric: f64,
    slices: usize,
    lambda: f64,
    seed: u64,
}

#[allow(clippy::too_many_arguments)]
fn sopt(
    x: &Path,
    y: &Path,
    dim: Option<usize>,
    lambda: f64,
    slices: usize,
    seed: u64,
    p: f64,
    per_slice: Option<&Path>,
) -> Result<ExitCode> {
    let cx = read_cloud_file(x, dim)?;
    let cy = read_cloud_file(y, Some(cx.dim()))?;
    let est = sopt_estimate(&cx, &cy, lambda, slices, seed, CostSpec::new(p)?)?;
    if let Some(path) = per_slice {
        let mut w = create(path)?;
        writeln!(w, "slice,value")?;
        for (l, v) in est.per_slice.iter().enumerate() {
            writeln!(w, "{l},{v:?}")?;
        }
        w.flush()?;
    }
    print_json(&SoptOutput {
        value: est.value,
        metric: est.metric(),
        slices,
        lambda,
        seed,
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct TransformFile {
    #[serde(rename = "R")]
    rotation: Vec<f64>,
    s: f64,
    beta: Vec<f64>,
}

#[derive(Serialize)]
struct RegisterOutput<'a> {
    #[serde(rename = "R")]
    rotation: Vec<f64>,
    s: f64,
    beta: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<f64>,
    warnings: usize,
    trace: &'a [TraceEntry],
}

fn registration(
    x: &Path,
    y: &Path,
    cfg: &RegistrationConfig,
    truth: Option<&Path>,
    trace: Option<&Path>,
) -> Result<ExitCode> {
    let cx = read_cloud_file(x, None)?;
    let cy = read_cloud_file(y, Some(cx.dim()))?;
    let truth = truth
        .map(|p| -> Result<Transform> {
            let text = std::fs::read_to_string(p)?;
            let t: TransformFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: e.line(),
                msg: e.to_string(),
            })?;
            Transform::from_parts(&t.rotation, t.s, &t.beta)
        })
        .transpose()?;
    let reg = register(&cx, &cy, cfg)?;
    for w in &reg.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = trace {
        let mut w = create(path)?;
        writeln!(w, "iteration,lambda,matched,fitted")?;
        for t in &reg.trace {
            writeln!(
                w,
                "{},{:?},{},{}",
                t.iteration, t.lambda, t.matched, t.fitted
            )?;
        }
        w.flush()?;
    }
    let t = &reg.transform;
    print_json(&RegisterOutput {
        rotation: t.rotation_row_major(),
        s: t.scale,
        beta: t.translation.as_slice(),
        error: truth.as_ref().map(|truth| transform_error(t, truth)),
        warnings: reg.warnings.len(),
        trace: &reg.trace,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn color(source: &Path, target: &Path, out: &Path, cfg: &ColorConfig) -> Result<ExitCode> {
    let src = Image::read_ppm_file(source)?;
    let tgt = Image::read_ppm_file(target)?;
    let result = color_transfer(&src, &tgt, cfg)?;
    result.image.write_ppm_file(out)?;
    let unmatched = result
        .transfer
        .matched
        .iter()
        .filter(|&&m| m < result.source_palette.len())
        .count();
    eprintln!(
        "palettes {} -> {}; {unmatched} of {} slices left some colours untransported",
        result.source_palette.len(),
        result.target_palette.len(),
        result.transfer.matched.len()
    );
    Ok(ExitCode::SUCCESS)
}
