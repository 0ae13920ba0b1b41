//! Instrumented checks run when `debug_invariants` is enabled.
//!
//! Boundary checks hold after every main-loop iteration:
//!
//! - I    `Ψ_j ≤ λ` (the initial target potential in full-transport mode)
//! - II   `Ψ_j < λ` implies `y_j` is assigned
//! - III  `Φ_i ≤ λ`
//! - IV   `Φ_i < λ` implies `x_i` is assigned, for processed `i`
//! - V    `Φ_i + Ψ_j ≤ c_ij` for all pairs
//! - VI   assigned pairs are tight
//! - VII  the assignment is strictly increasing
//!
//! Inside a conflict the chain property (VIII) is checked at every step,
//! together with the reductions that make the solver fast: the argmin may be
//! restricted to `j ≥ j_last`, a competing assigned target is held by
//! `x_{k−1}` unless the points in between coincide, and only the two boundary
//! constraints of the chain can become tight.
//!
//! Checks are `O(nm)` per iteration and meant for small instances.

use super::engine::{Chain, Engine};
use crate::error::{Error, Result};

const CHECK_TOL: f64 = 1e-9;

fn tol(mag: f64) -> f64 {
    CHECK_TOL * (1.0 + mag.abs())
}

fn fail(which: &'static str, point: usize, detail: String) -> Error {
    Error::InvariantViolated {
        which,
        point,
        detail,
    }
}

pub(crate) fn check_boundary(e: &Engine<'_>, k: usize) -> Result<()> {
    let (n, m) = (e.x.len(), e.y.len());
    let lam = e.lambda;
    let lam_mag = if lam.is_finite() { lam } else { 0.0 };

    for j in 0..m {
        let psi = e.psi[j];
        if psi > e.psi_init + tol(e.psi_init) {
            return Err(fail(
                "I",
                k,
                format!("Ψ[{j}] = {psi} exceeds {}", e.psi_init),
            ));
        }
        if psi < e.psi_init - tol(e.psi_init) && e.owner[j].is_none() {
            return Err(fail("II", k, format!("Ψ[{j}] = {psi} but y_{j} is free")));
        }
    }
    for i in 0..=k {
        let phi = e.phi[i];
        if phi > lam + tol(lam_mag) {
            return Err(fail("III", k, format!("Φ[{i}] = {phi} exceeds λ = {lam}")));
        }
        if lam.is_finite() && phi < lam - tol(lam) && e.assign[i].is_none() {
            return Err(fail(
                "IV",
                k,
                format!("Φ[{i}] = {phi} < λ but x_{i} is destroyed"),
            ));
        }
        if !lam.is_finite() && e.assign[i].is_none() {
            return Err(fail(
                "IV",
                k,
                format!("x_{i} is destroyed in full-transport mode"),
            ));
        }
    }
    for i in 0..=k {
        for j in 0..m {
            let c = e.c(i, j);
            let slack = c - e.phi[i] - e.psi[j];
            if slack < -tol(c.max(lam_mag)) {
                return Err(fail(
                    "V",
                    k,
                    format!("Φ[{i}] + Ψ[{j}] exceeds c by {}", -slack),
                ));
            }
        }
    }
    let mut prev: Option<(usize, usize)> = None;
    for i in 0..n {
        let Some(j) = e.assign[i] else { continue };
        if i > k {
            return Err(fail("VII", k, format!("unprocessed x_{i} is assigned")));
        }
        if e.owner[j] != Some(i) {
            return Err(fail("VII", k, format!("inverse map disagrees at y_{j}")));
        }
        let c = e.c(i, j);
        let gap = (c - e.phi[i] - e.psi[j]).abs();
        if gap > tol(c.max(lam_mag)) {
            return Err(fail("VI", k, format!("pair ({i}, {j}) has slack {gap}")));
        }
        if let Some((pi, pj)) = prev {
            if j <= pj {
                return Err(fail("VII", k, format!("L[{pi}] = {pj} but L[{i}] = {j}")));
            }
        }
        prev = Some((i, j));
    }
    for (j, o) in e.owner.iter().enumerate() {
        if let Some(i) = *o {
            if e.assign[i] != Some(j) {
                return Err(fail(
                    "VII",
                    k,
                    format!("inverse map has stale entry at y_{j}"),
                ));
            }
        }
    }
    Ok(())
}

/// The argmin over `j ≥ j_last` agrees with brute force, and nothing before
/// `j_last` does strictly better.
pub(crate) fn check_best_target(
    e: &Engine<'_>,
    k: usize,
    j_last: usize,
    j_star: usize,
    reduced: f64,
) -> Result<()> {
    let m = e.y.len();
    let red = |j: usize| e.c(k, j) - e.psi[j];
    let tail_min = (j_last..m).map(red).fold(f64::INFINITY, f64::min);
    let all_min = (0..m).map(red).fold(f64::INFINITY, f64::min);
    let t = tol(reduced);
    if (tail_min - reduced).abs() > t || j_star < j_last {
        return Err(fail(
            "argmin",
            k,
            format!("selected y_{j_star} with {reduced}, brute force gives {tail_min}"),
        ));
    }
    if all_min < reduced - t {
        return Err(fail(
            "argmin-tail",
            k,
            format!("a target before j_last = {j_last} is strictly better ({all_min} < {reduced})"),
        ));
    }
    Ok(())
}

/// A target claimed by a non-adjacent source may only be released when all
/// sources in between coincide and the releasing one sits at `λ`.
pub(crate) fn check_duplicate_release(e: &Engine<'_>, i: usize, upto: usize) -> Result<()> {
    let xi = e.x[i];
    for ip in i..upto {
        if (e.x[ip] - xi).abs() > tol(xi) {
            return Err(fail(
                "chain-end",
                upto,
                format!("x_{i} = {xi} and x_{ip} = {} differ", e.x[ip]),
            ));
        }
    }
    if e.lambda.is_finite() && (e.phi[i] - e.lambda).abs() > tol(e.lambda) {
        return Err(fail(
            "chain-end",
            upto,
            format!("released x_{i} has Φ = {} ≠ λ", e.phi[i]),
        ));
    }
    Ok(())
}

pub(crate) fn check_chain(e: &Engine<'_>, ch: &Chain, alpha: f64, beta: f64) -> Result<()> {
    let k = ch.k;
    let m = e.y.len();
    let lam = e.lambda;
    let lam_mag = if lam.is_finite() { lam } else { 0.0 };
    if ch.j_star - ch.j_min != (k - 1) - ch.i_min {
        return Err(fail("VIII", k, "chain lengths differ".into()));
    }
    for r in 0..k - ch.i_min {
        let i = ch.i_min + r;
        let j = ch.j_min + r;
        if e.assign[i] != Some(j) {
            return Err(fail(
                "VIII",
                k,
                format!("L[{i}] = {:?}, expected {j}", e.assign[i]),
            ));
        }
        let c = e.c(i, j);
        let gap = (c - e.real_phi(ch, i) - e.real_psi(ch, j)).abs();
        if gap > tol(c.max(lam_mag)) {
            return Err(fail(
                "VIII",
                k,
                format!("chain pair ({i}, {j}) has slack {gap}"),
            ));
        }
        if r > 0 {
            let c = e.c(i, j - 1);
            let gap = (c - e.real_phi(ch, i) - e.real_psi(ch, j - 1)).abs();
            if gap > tol(c.max(lam_mag)) {
                return Err(fail(
                    "VIII",
                    k,
                    format!("chain neighbour ({i}, {}) has slack {gap}", j - 1),
                ));
            }
        }
    }
    let c = e.c(k, ch.j_star);
    let gap = (c - e.real_phi(ch, k) - e.real_psi(ch, ch.j_star)).abs();
    if gap > tol(c.max(lam_mag)) {
        return Err(fail(
            "VIII",
            k,
            format!("new point is not tight with y_{}", ch.j_star),
        ));
    }

    if lam.is_finite() {
        let best = (ch.i_min..=k)
            .map(|i| lam - e.real_phi(ch, i))
            .fold(f64::INFINITY, f64::min);
        if (best - ch.lambda_delta).abs() > tol(lam) {
            return Err(fail(
                "VIII",
                k,
                format!("tracked distance to λ {} != {best}", ch.lambda_delta),
            ));
        }
    }

    let slack = |i: usize, j: usize| e.c(i, j) - e.real_phi(ch, i) - e.real_psi(ch, j);
    if ch.j_star + 1 < m {
        let brute = (ch.i_min..=k)
            .flat_map(|i| (ch.j_star + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| slack(i, j))
            .fold(f64::INFINITY, f64::min);
        if (brute.max(0.0) - alpha).abs() > tol(brute.abs().max(lam_mag)) {
            return Err(fail(
                "path-reduction",
                k,
                format!("right boundary slack {alpha}, block minimum {brute}"),
            ));
        }
    }
    if ch.j_min > 0 {
        let brute = (ch.i_min..=k)
            .flat_map(|i| (0..ch.j_min).map(move |j| (i, j)))
            .map(|(i, j)| slack(i, j))
            .fold(f64::INFINITY, f64::min);
        if (brute.max(0.0) - beta).abs() > tol(brute.abs().max(lam_mag)) {
            return Err(fail(
                "path-reduction",
                k,
                format!("left boundary slack {beta}, block minimum {brute}"),
            ));
        }
    }
    Ok(())
}
