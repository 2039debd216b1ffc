//! Picard iteration on the integral inequality
//!
//! ```text
//! u(r,t) >= C t/(1+r+t)^{1+kappa} + (1/(8 r^m)) int_0^t dtau int_{r-t+tau}^{r+t-tau} lambda^m F(u(lambda,tau)) dlambda
//! ```
//!
//! (and its `n = 2, 3` counterpart with the Riemann operator). Starting from
//! the seed term, each step substitutes the current lower bound into the
//! right-hand side. Growth past a threshold is an observation about the
//! discretised operator, not a proof of blow-up.
//!
//! The state lives on a characteristic-aligned triangle below the apex
//! `(r*, t*)`: with `h = t*/L`, level `j` (`tau = j h`) holds the nodes
//! `lambda = r* - t* + k h` for `k = j..=2L-j`. The backward triangle of
//! every node is then a union of whole grid rows, so no interpolation is
//! needed at its slanted edges.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::Region;
use crate::error::{Error, Result};
use crate::fdm::Nonlinearity;
use crate::freewave::{riemann_operator, LowDim};
use crate::profile::norm;
use crate::quadrature::QuadratureSpec;
use crate::specfun::{kappa0, lemma_constants};

pub const DEFAULT_THRESHOLD: f64 = 1e6;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const MAX_ITERS: usize = 200;
pub const DEFAULT_LEVELS: usize = 128;
/// Iteration index at which [`BlowupReport::growth_ratio`] is read.
pub const GROWTH_ITER: usize = 30;

pub const DISCLAIMER: &str = "Verdicts describe the discretised Picard iteration at a single apex. \
They are empirical observations and do not prove or disprove blow-up.";

/// Relative slack for the nodewise monotonicity check, which absorbs the
/// rounding of the prefix-sum differences.
const MONOTONE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct IterationState {
    pub n: usize,
    pub apex: (f64, f64),
    pub levels: usize,
    pub kappa: f64,
    pub seed_constant: f64,
    /// `values[j][k]`, meaningful for `j <= k <= 2L - j`.
    pub values: Vec<Vec<f64>>,
    pub k: usize,
    /// Apex value after each iteration, starting with the seed.
    pub history: Vec<f64>,
}

impl IterationState {
    /// State holding the seed term, with `k = 0`.
    pub fn seeded(n: usize, apex: (f64, f64), levels: usize, kappa: f64, seed_constant: f64) -> Result<Self> {
        let mut s = Self::filled(n, apex, levels, kappa, seed_constant, |_, _| 0.0)?;
        let seed: Vec<Vec<f64>> = (0..=levels)
            .map(|j| (0..=2 * levels).map(|k| s.seed_at(j, k)).collect())
            .collect();
        s.values = seed;
        s.history = vec![s.apex_value()];
        Ok(s)
    }

    /// State with arbitrary values `u(lambda, tau)`.
    pub fn filled(
        n: usize,
        apex: (f64, f64),
        levels: usize,
        kappa: f64,
        seed_constant: f64,
        u: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if levels < 4 {
            return Err(Error::GridTooCoarse(format!(
                "{levels} levels leave fewer than 4 grid lines in the apex triangle"
            )));
        }
        let (r, t) = apex;
        if !(t > 0.0 && r > t) {
            return Err(Error::InvalidParameter(format!("apex ({r}, {t}) needs r > t > 0")));
        }
        let mut s = IterationState {
            n,
            apex,
            levels,
            kappa,
            seed_constant,
            values: Vec::new(),
            k: 0,
            history: Vec::new(),
        };
        s.values = (0..=levels)
            .map(|j| {
                (0..=2 * levels)
                    .map(|k| {
                        let (l, tau) = s.node(j, k);
                        u(l, tau)
                    })
                    .collect()
            })
            .collect();
        s.history = vec![s.apex_value()];
        Ok(s)
    }

    pub fn h(&self) -> f64 {
        self.apex.1 / self.levels as f64
    }

    /// `(lambda, tau)` of node `k` on level `j`.
    pub fn node(&self, j: usize, k: usize) -> (f64, f64) {
        let h = self.h();
        (self.apex.0 - self.apex.1 + k as f64 * h, j as f64 * h)
    }

    pub fn seed_at(&self, j: usize, k: usize) -> f64 {
        let (l, tau) = self.node(j, k);
        self.seed_constant * tau * (1.0 + l + tau).powf(-1.0 - self.kappa)
    }

    pub fn apex_value(&self) -> f64 {
        self.values[self.levels][self.levels]
    }

    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[j][k]
    }

    /// Iterates over `(j, k)` of every node of the triangle.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.levels).flat_map(move |j| (j..=2 * self.levels - j).map(move |k| (j, k)))
    }

    fn m(&self) -> usize {
        self.n / 2
    }

    /// Linear interpolation on level `j` at radius `lambda`.
    fn interp(&self, j: usize, lambda: f64) -> f64 {
        let h = self.h();
        let lo = j;
        let hi = 2 * self.levels - j;
        let x = (lambda - (self.apex.0 - self.apex.1)) / h;
        let i = (x.floor().max(lo as f64) as usize).min(hi.saturating_sub(1).max(lo));
        if i >= hi {
            return self.values[j][hi];
        }
        let s = (x - i as f64).clamp(0.0, 1.0);
        (1.0 - s) * self.values[j][i] + s * self.values[j][i + 1]
    }

    /// Errors unless `next` is nodewise at least `self` and the seed, as
    /// successive iterates must be.
    pub fn check_successor(&self, next: &IterationState) -> Result<()> {
        for (j, k) in self.nodes() {
            let (old, new, seed) = (self.values[j][k], next.values[j][k], self.seed_at(j, k));
            if new.is_nan() {
                continue;
            }
            let slack = MONOTONE_SLACK * old.abs().max(seed.abs());
            if new < old - slack || new < seed - slack {
                return Err(Error::Invariant(format!(
                    "iterate decreased at level {j}, node {k}: {old} -> {new} (seed {seed})"
                )));
            }
        }
        Ok(())
    }

    fn with_values(&self, values: Vec<Vec<f64>>) -> Self {
        let mut next = IterationState {
            values,
            k: self.k + 1,
            history: self.history.clone(),
            ..self.clone_shell()
        };
        next.history.push(next.apex_value());
        next
    }

    fn clone_shell(&self) -> Self {
        IterationState {
            n: self.n,
            apex: self.apex,
            levels: self.levels,
            kappa: self.kappa,
            seed_constant: self.seed_constant,
            values: Vec::new(),
            k: self.k,
            history: Vec::new(),
        }
    }
}

fn trapezoid_weight(i: usize, last: usize, h: f64) -> f64 {
    if i == 0 || i == last {
        0.5 * h
    } else {
        h
    }
}

/// One Picard step in `n >= 4`: composite trapezoid over the aligned grid,
/// with prefix sums of `(lambda/r*)^m F(u)` on every level.
pub fn duhamel_apply_high(state: &IterationState, f: &Nonlinearity) -> Result<IterationState> {
    let m = state.m();
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "high-dimensional iteration needs n >= 4, got {}",
            state.n
        )));
    }
    let big_l = state.levels;
    let h = state.h();
    let r_star = state.apex.0;
    let mi = m as i32;
    // prefix[j][i] = sum_{k < i} G_j(k)
    let (gvals, prefix): (Vec<Vec<f64>>, Vec<Vec<f64>>) = (0..=big_l)
        .map(|j| {
            let g: Vec<f64> = (0..=2 * big_l)
                .map(|k| {
                    if k < j || k > 2 * big_l - j {
                        return 0.0;
                    }
                    let (l, _) = state.node(j, k);
                    (l / r_star).powi(mi) * f.eval(state.values[j][k])
                })
                .collect();
            let mut p = Vec::with_capacity(g.len() + 1);
            let mut acc = 0.0;
            p.push(0.0);
            for v in &g {
                acc += v;
                p.push(acc);
            }
            (g, p)
        })
        .unzip();
    let next: Vec<Vec<f64>> = (0..=big_l)
        .into_par_iter()
        .map(|j| {
            (0..=2 * big_l)
                .map(|k| {
                    if k < j || k > 2 * big_l - j {
                        return 0.0;
                    }
                    let mut outer = 0.0;
                    for jp in 0..j {
                        let d = j - jp;
                        let (a, b) = (k - d, k + d);
                        let inner = h * (prefix[jp][b + 1] - prefix[jp][a])
                            - 0.5 * h * (gvals[jp][a] + gvals[jp][b]);
                        outer += trapezoid_weight(jp, j, h) * inner.max(0.0);
                    }
                    let (l, _) = state.node(j, k);
                    state.seed_at(j, k) + (r_star / l).powi(mi) * outer / 8.0
                })
                .collect()
        })
        .collect();
    Ok(state.with_values(next))
}

/// One Picard step in `n = 2, 3`: the Riemann operator applied with the
/// spherical quadrature of the free-solution module to the linearly
/// interpolated radial iterate, then a trapezoid rule in `tau`.
pub fn duhamel_apply_low(
    state: &IterationState,
    f: &Nonlinearity,
    q: &QuadratureSpec,
) -> Result<IterationState> {
    let dim = LowDim::from_n(state.n)?;
    let big_l = state.levels;
    let h = state.h();
    let next: Vec<Vec<f64>> = (0..=big_l)
        .into_par_iter()
        .map(|j| {
            (0..=2 * big_l)
                .map(|k| {
                    if k < j || k > 2 * big_l - j {
                        return 0.0;
                    }
                    let (l, tau) = state.node(j, k);
                    let x = [l, 0.0, 0.0];
                    let mut outer = 0.0;
                    for jp in 0..j {
                        let s = tau - jp as f64 * h;
                        let r = riemann_operator(dim, x, s, q, |y| {
                            f.eval(state.interp(jp, norm(y)))
                        });
                        outer += trapezoid_weight(jp, j, h) * r.max(0.0);
                    }
                    state.seed_at(j, k) + outer
                })
                .collect()
        })
        .collect();
    Ok(state.with_values(next))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Verdict {
    Diverged { k: usize, value: f64 },
    BoundedAtHorizon { max_value: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupReport {
    pub n: usize,
    pub p: f64,
    pub a: f64,
    pub kappa: f64,
    pub kappa0: f64,
    pub apex: (f64, f64),
    pub threshold: f64,
    pub seed_constant: f64,
    pub levels: usize,
    pub verdict: Verdict,
    pub history: Vec<f64>,
    pub disclaimer: &'static str,
}

impl BlowupReport {
    /// `history[30] / history[0]`; infinite if the run diverged earlier.
    pub fn growth_ratio(&self) -> f64 {
        match self.history.get(GROWTH_ITER) {
            Some(v) if v.is_finite() => v / self.history[0],
            _ => f64::INFINITY,
        }
    }

    pub fn diverged(&self) -> bool {
        matches!(self.verdict, Verdict::Diverged { .. })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone)]
pub struct IterationConfig {
    pub n: usize,
    pub p: f64,
    pub a: f64,
    pub kappa: f64,
    pub apex: (f64, f64),
    pub max_iters: usize,
    pub threshold: f64,
    pub levels: usize,
    /// `R` of the region the apex must lie in.
    pub r_big: f64,
    /// Defaults to [`default_seed_constant`].
    pub seed_constant: Option<f64>,
    /// Sphere quadrature for `n = 2, 3`.
    pub low_quadrature: QuadratureSpec,
}

impl IterationConfig {
    pub fn new(n: usize, p: f64, a: f64, kappa: f64, apex: (f64, f64)) -> Self {
        IterationConfig {
            n,
            p,
            a,
            kappa,
            apex,
            max_iters: DEFAULT_MAX_ITERS,
            threshold: DEFAULT_THRESHOLD,
            levels: if n <= 3 { 32 } else { DEFAULT_LEVELS },
            r_big: 1.0,
            seed_constant: None,
            low_quadrature: QuadratureSpec::new(8, 8, 16),
        }
    }

    /// The region the apex must lie in: `Sigma1` with `delta` of
    /// dimension `n` for `n >= 4`, `Sigma2` otherwise.
    pub fn region(&self) -> Result<Region> {
        if self.n <= 3 {
            Region::sigma2(self.n, self.r_big)
        } else {
            Region::sigma1(self.n, self.r_big, lemma_constants(self.n / 2)?.delta)
        }
    }
}

/// Seed constant of the built-in data family with unit constants:
/// `C2/4` (odd), `C3/(pi sqrt 2)` (even), `C0` (low).
pub fn default_seed_constant(n: usize) -> f64 {
    if n <= 3 {
        1.0
    } else if n % 2 == 1 {
        0.25
    } else {
        1.0 / (std::f64::consts::PI * 2f64.sqrt())
    }
}

/// Iterates from the seed until the apex value exceeds the threshold (or
/// stops being finite) or `max_iters` steps have run.
pub fn run_iteration(cfg: &IterationConfig) -> Result<BlowupReport> {
    let k0 = kappa0(cfg.p)?;
    if !(cfg.kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa must be > 0, got {}", cfg.kappa)));
    }
    if cfg.max_iters > MAX_ITERS {
        return Err(Error::InvalidParameter(format!(
            "max_iters = {} exceeds {MAX_ITERS}",
            cfg.max_iters
        )));
    }
    if !(cfg.threshold > 0.0) {
        return Err(Error::InvalidParameter("threshold must be > 0".into()));
    }
    let region = cfg.region()?;
    if !region.contains(cfg.apex.0, cfg.apex.1) {
        return Err(Error::InvalidParameter(format!(
            "apex ({}, {}) is not in {}",
            cfg.apex.0,
            cfg.apex.1,
            region.describe()
        )));
    }
    let f = if cfg.a == 0.0 {
        Nonlinearity::Zero
    } else {
        Nonlinearity::power(cfg.a, cfg.p)?
    };
    let seed_constant = cfg.seed_constant.unwrap_or_else(|| default_seed_constant(cfg.n));
    let mut state = IterationState::seeded(cfg.n, cfg.apex, cfg.levels, cfg.kappa, seed_constant)?;
    let mut verdict = None;
    for _ in 0..cfg.max_iters {
        let next = if cfg.n <= 3 {
            duhamel_apply_low(&state, &f, &cfg.low_quadrature)?
        } else {
            duhamel_apply_high(&state, &f)?
        };
        state.check_successor(&next)?;
        state = next;
        let v = state.apex_value();
        if !v.is_finite() || v > cfg.threshold {
            verdict = Some(Verdict::Diverged { k: state.k, value: v });
            break;
        }
    }
    let verdict = verdict.unwrap_or(Verdict::BoundedAtHorizon {
        max_value: state.history.iter().copied().fold(0.0, f64::max),
    });
    Ok(BlowupReport {
        n: cfg.n,
        p: cfg.p,
        a: cfg.a,
        kappa: cfg.kappa,
        kappa0: k0,
        apex: cfg.apex,
        threshold: cfg.threshold,
        seed_constant,
        levels: cfg.levels,
        verdict,
        history: state.history,
        disclaimer: DISCLAIMER,
    })
}

/// [`run_iteration`] for each `kappa`, in parallel, reports in input order.
pub fn kappa_sweep(base: &IterationConfig, kappas: &[f64]) -> Result<Vec<BlowupReport>> {
    kappas
        .par_iter()
        .map(|&kappa| {
            let mut cfg = base.clone();
            cfg.kappa = kappa;
            run_iteration(&cfg)
        })
        .collect()
}

/// `kappa,iter,apex_value` rows for every report.
pub fn sweep_csv(reports: &[BlowupReport]) -> String {
    let mut out = String::from("kappa,iter,apex_value\n");
    for rep in reports {
        for (k, v) in rep.history.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", rep.kappa, k, v);
        }
    }
    out
}
