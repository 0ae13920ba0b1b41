//! Primal-dual engine for sorted inputs.
//!
//! Source points are inserted one at a time. Each new point either is
//! destroyed (its potential reaches `λ`), takes a free target, or competes for
//! an already assigned target, in which case a contiguous chain of assigned
//! pairs has its potentials shifted together until one of three events
//! resolves the conflict. Potential shifts along the chain are applied lazily:
//! `v` is the total shift so far and `snapshot[i]` the value of `v` when `x_i`
//! joined the chain, so `x_i` is owed `v − snapshot[i]`.

use super::invariants;
use crate::error::{Error, Result};
use crate::types::{CostSpec, SolveStats};

pub(crate) struct Engine<'a> {
    pub(crate) x: &'a [f64],
    pub(crate) y: &'a [f64],
    pub(crate) cost: CostSpec,
    /// `+∞` in full-transport mode.
    pub(crate) lambda: f64,
    pub(crate) psi_init: f64,
    eps: f64,
    debug: bool,
    pub(crate) phi: Vec<f64>,
    pub(crate) psi: Vec<f64>,
    pub(crate) assign: Vec<Option<usize>>,
    pub(crate) owner: Vec<Option<usize>>,
    snapshot: Vec<f64>,
    j_last: usize,
    stats: SolveStats,
}

pub(crate) struct EngineOutput {
    pub assign: Vec<Option<usize>>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub stats: SolveStats,
}

/// Chain bookkeeping during one conflict resolution.
pub(crate) struct Chain {
    pub k: usize,
    pub j_star: usize,
    pub i_min: usize,
    pub j_min: usize,
    pub v: f64,
    pub i_delta: usize,
    pub lambda_delta: f64,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(
        x: &'a [f64],
        y: &'a [f64],
        cost: CostSpec,
        lambda: f64,
        psi_init: f64,
        eps: f64,
        debug: bool,
    ) -> Self {
        let (n, m) = (x.len(), y.len());
        Self {
            x,
            y,
            cost,
            lambda,
            psi_init,
            eps,
            debug,
            phi: vec![f64::NEG_INFINITY; n],
            psi: vec![psi_init; m],
            assign: vec![None; n],
            owner: vec![None; m],
            snapshot: vec![0.0; n],
            j_last: 0,
            stats: SolveStats::default(),
        }
    }

    pub(crate) fn run(mut self) -> Result<EngineOutput> {
        for k in 0..self.x.len() {
            self.stats.iterations += 1;
            self.insert(k)?;
            if self.debug {
                invariants::check_boundary(&self, k)?;
            }
        }
        Ok(EngineOutput {
            assign: self.assign,
            phi: self.phi,
            psi: self.psi,
            stats: self.stats,
        })
    }

    #[inline]
    pub(crate) fn c(&self, i: usize, j: usize) -> f64 {
        self.cost.eval(self.x[i], self.y[j])
    }

    /// Smallest minimiser of `c(x_k, y_j) − Ψ_j` over `j ≥ j_last`.
    ///
    /// Targets after `j_last` have never been assigned, so their potentials
    /// are all still `psi_init` and the minimum among them is at the target
    /// closest to `x_k`, found by binary search.
    fn best_target(&self, k: usize) -> (usize, f64) {
        let xk = self.x[k];
        let jl = self.j_last;
        let mut best = (jl, self.c(k, jl) - self.psi[jl]);
        let tail = &self.y[jl + 1..];
        if tail.is_empty() {
            return best;
        }
        let split = tail.partition_point(|&v| v < xk);
        let below = (split > 0).then(|| {
            let value = tail[split - 1];
            jl + 1 + tail.partition_point(|&v| v < value)
        });
        let above = (split < tail.len()).then_some(jl + 1 + split);
        for j in below.into_iter().chain(above) {
            let val = self.c(k, j) - self.psi[j];
            if val < best.1 {
                best = (j, val);
            }
        }
        best
    }

    fn set_pair(&mut self, i: usize, j: usize) {
        self.assign[i] = Some(j);
        self.owner[j] = Some(i);
    }

    fn insert(&mut self, k: usize) -> Result<()> {
        if self.y.is_empty() {
            self.phi[k] = self.lambda;
            self.stats.destroyed_on_arrival += 1;
            return Ok(());
        }
        let (j_star, reduced) = self.best_target(k);
        if self.debug {
            invariants::check_best_target(self, k, self.j_last, j_star, reduced)?;
        }
        let phi_k = reduced.min(self.lambda);
        self.phi[k] = phi_k;

        if self.lambda.is_finite() && phi_k >= self.lambda - self.eps {
            self.stats.destroyed_on_arrival += 1;
            return Ok(());
        }
        match self.owner[j_star] {
            None => {
                self.set_pair(k, j_star);
                self.j_last = j_star;
                self.stats.direct_assignments += 1;
            }
            Some(i) if i + 1 < k => {
                // Equal coordinates: x_i sits at λ and can give y_{j*} up.
                if self.debug {
                    invariants::check_duplicate_release(self, i, k)?;
                }
                self.assign[i] = None;
                self.set_pair(k, j_star);
                self.stats.duplicate_repairs += 1;
            }
            Some(_) => {
                self.stats.conflicts += 1;
                self.resolve_conflict(k, j_star)?;
            }
        }
        Ok(())
    }

    /// Applies the deferred potential shifts to the chain `[i_min, k]`.
    fn settle(&mut self, i_min: usize, k: usize, v: f64) {
        for i in i_min..k {
            let inc = v - self.snapshot[i];
            self.phi[i] += inc;
            let j = self.assign[i].expect("chain members are assigned");
            self.psi[j] -= inc;
        }
        self.phi[k] += v;
    }

    /// Moves every chain member in `from..k` one target to the left.
    fn shift_left(&mut self, from: usize, k: usize) {
        for i in from..k {
            let j = self.assign[i].expect("chain members are assigned") - 1;
            self.set_pair(i, j);
        }
    }

    pub(crate) fn real_phi(&self, chain: &Chain, i: usize) -> f64 {
        if i == chain.k {
            self.phi[i] + chain.v
        } else if i >= chain.i_min && i < chain.k {
            self.phi[i] + chain.v - self.snapshot[i]
        } else {
            self.phi[i]
        }
    }

    pub(crate) fn real_psi(&self, chain: &Chain, j: usize) -> f64 {
        if j >= chain.j_min && j <= chain.j_star {
            let i = self.owner[j].expect("chain targets are assigned");
            self.psi[j] - (chain.v - self.snapshot[i])
        } else {
            self.psi[j]
        }
    }

    fn resolve_conflict(&mut self, k: usize, j_star: usize) -> Result<()> {
        let m = self.y.len();
        let lambda = self.lambda;
        self.snapshot[k - 1] = 0.0;
        self.snapshot[k] = 0.0;
        let (to_prev, to_new) = (lambda - self.phi[k - 1], lambda - self.phi[k]);
        let (i_delta, lambda_delta) = if to_new <= to_prev {
            (k, to_new)
        } else {
            (k - 1, to_prev)
        };
        let mut ch = Chain {
            k,
            j_star,
            i_min: k - 1,
            j_min: j_star,
            v: 0.0,
            i_delta,
            lambda_delta,
        };

        loop {
            self.stats.chain_steps += 1;
            let alpha = if j_star + 1 < m {
                let raw = self.c(k, j_star + 1) - (self.phi[k] + ch.v) - self.psi[j_star + 1];
                raw.max(0.0)
            } else {
                f64::INFINITY
            };
            let beta = if ch.j_min > 0 {
                let real_phi = self.phi[ch.i_min] + ch.v - self.snapshot[ch.i_min];
                let raw = self.c(ch.i_min, ch.j_min - 1) - real_phi - self.psi[ch.j_min - 1];
                raw.max(0.0)
            } else {
                f64::INFINITY
            };
            if self.debug {
                invariants::check_chain(self, &ch, alpha, beta)?;
            }

            if ch.lambda_delta <= alpha.min(beta) + self.eps {
                if !ch.lambda_delta.is_finite() {
                    return Err(Error::Degenerate(format!(
                        "conflict for source {k} has no finite resolution; full transport needs n <= m"
                    )));
                }
                // A chain member (or x_k) reaches λ and is destroyed.
                ch.v += ch.lambda_delta;
                self.settle(ch.i_min, k, ch.v);
                if ch.i_delta == k {
                    self.assign[k] = None;
                } else {
                    self.assign[ch.i_delta] = None;
                    self.shift_left(ch.i_delta + 1, k);
                    self.set_pair(k, j_star);
                }
                return Ok(());
            }
            if alpha <= ch.lambda_delta.min(beta) + self.eps {
                // x_k becomes tight with the free target to the right.
                ch.v += alpha;
                self.settle(ch.i_min, k, ch.v);
                self.set_pair(k, j_star + 1);
                self.j_last = j_star + 1;
                return Ok(());
            }

            ch.v += beta;
            let left = ch.j_min - 1;
            match self.owner[left] {
                Some(i) if i + 1 == ch.i_min => {
                    // Grow the chain by the pair (x_i, y_left).
                    self.snapshot[i] = ch.v;
                    ch.lambda_delta -= beta;
                    ch.i_min = i;
                    ch.j_min = left;
                    let gap = lambda - self.phi[i];
                    if gap < ch.lambda_delta {
                        ch.lambda_delta = gap;
                        ch.i_delta = i;
                    }
                    continue;
                }
                Some(i) => {
                    // Equal coordinates: x_i sits at λ and releases y_left.
                    if self.debug {
                        invariants::check_duplicate_release(self, i, ch.i_min)?;
                    }
                    self.assign[i] = None;
                    self.owner[left] = None;
                    self.stats.duplicate_repairs += 1;
                }
                None => {}
            }
            // The chain slides left onto the free target y_left.
            self.settle(ch.i_min, k, ch.v);
            self.shift_left(ch.i_min, k);
            self.set_pair(k, j_star);
            return Ok(());
        }
    }
}
