//! Sampled checks of the kernel inequalities behind the even- and
//! odd-dimensional lower bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::region::{RegionGrid, RegionPoint};
use crate::certificate::{Certificate, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::kernel::{
    dtheta_dt, kernel_k_scaled, kernel_theta, lambda_tilde, n_critical_points, n_expanded,
    n_factored, n_scale, theta, KernelTerms,
};
use crate::profile::RadialProfile;
use crate::specfun::{chebyshev_jet, chebyshev_points, lemma_constants};

/// Runs `visit` on every grid point in parallel and merges the results in
/// grid order.
pub(crate) fn sweep(
    base: Certificate,
    grid: &RegionGrid,
    visit: impl Fn(&RegionPoint, &mut Certificate) + Sync,
) -> Certificate {
    let proto = base.empty_like();
    let merged = grid
        .points
        .par_iter()
        .map(|p| {
            let mut c = proto.empty_like();
            visit(p, &mut c);
            c
        })
        .reduce(|| proto.empty_like(), Certificate::merge);
    base.merge(merged)
}

/// Sample nodes on `[0, 1]` including both ends.
fn unit_samples(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = chebyshev_points(0.0, 1.0, n).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `Theta(lambda, r, t) >= (r-t)/(r+t) >= delta/(delta+2)` at Chebyshev
/// samples of `[r-t, r+t]` plus the minimiser `sqrt(r^2 - t^2)`.
///
/// `check` 0 is the first link, 1 the second, 2 the combined bound.
pub fn verify_theta_bound(m: usize, grid: &RegionGrid, lambda_samples: usize) -> Result<Certificate> {
    let delta = grid.region.delta;
    let bound = delta / (delta + 2.0);
    let base = Certificate::new(
        format!("theta-bound(m={m})"),
        grid.region.describe(),
        &["r", "t", "lambda", "check"],
        DEFAULT_TOLERANCE,
    )
    .with_constant("delta", delta)
    .with_constant("bound", bound);
    Ok(sweep(base, grid, |p, c| {
        let (r, t) = (p.r, p.t);
        let ratio = (r - t) / (r + t);
        c.record(&[r, t, f64::NAN, 1.0], ratio - bound);
        let star = (r * r - t * t).max(0.0).sqrt();
        for lam in chebyshev_points(r - t, r + t, lambda_samples).chain(std::iter::once(star)) {
            let th = theta(lam, r, t);
            c.record(&[r, t, lam, 0.0], th - ratio);
            c.record(&[r, t, lam, 2.0], th - bound);
        }
    }))
}

/// Expanded versus factored `N` at `samples` random `(r, t, eta, xi)` with
/// `r > t > 0`. Margins are `1 - rel_err / 1e-12`, so a margin below zero
/// means relative disagreement above `1e-12` (relative to the sum of the
/// monomial magnitudes). `check` 1 and 2 are the endpoint zeros.
pub fn verify_n_factorization(samples: usize, seed: u64) -> Result<Certificate> {
    if samples < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need at least 1000 samples, got {samples}"
        )));
    }
    const REL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 4]> = (0..samples)
        .map(|_| {
            let r = 10f64.powf(rng.gen_range(-1.0..4.0));
            let t = r * (1.0 - rng.gen::<f64>());
            [r, t, rng.gen::<f64>(), rng.gen::<f64>()]
        })
        .collect();
    let mut cert = Certificate::new(
        "n-factorization",
        "random r > t > 0, eta, xi in [0, 1]",
        &["r", "t", "eta", "xi", "check"],
        DEFAULT_TOLERANCE,
    )
    .with_constant("relative_tolerance", REL);
    for [r, t, eta, xi] in pts {
        let scale = n_scale(r, t, eta, xi).max(n_scale(r, t, eta, 1.0));
        let rel = |v: f64| if scale == 0.0 { v.abs() } else { v.abs() / scale };
        let diff = n_expanded(r, t, eta, xi) - n_factored(r, t, eta, xi);
        cert.record(&[r, t, eta, xi, 0.0], 1.0 - rel(diff) / REL);
        for (k, end) in [(1.0, 0.0), (2.0, 1.0)] {
            let worst = rel(n_expanded(r, t, eta, end)).max(rel(n_factored(r, t, eta, end)));
            cert.record(&[r, t, eta, end, k], 1.0 - worst / REL);
        }
    }
    Ok(cert)
}

/// `-5 zeta_m / (3 lambda~) <= d_t Theta <= 0` on a tensor sample of
/// `(eta, xi)`, plus the location of the minimum of `N`.
///
/// `check`: 0 lower bound, 1 upper bound, 2 `xi_+ - 1`, 3 `xi_-`,
/// 4 `1 - xi_-`, 5 sampled argmin within one local grid gap of `xi_-`.
pub fn verify_dtheta_bounds(m: usize, grid: &RegionGrid, samples_eta_xi: usize) -> Result<Certificate> {
    let zeta = lemma_constants(m)?.zeta_m;
    let nodes = unit_samples(samples_eta_xi);
    let base = Certificate::new(
        format!("dtheta-bounds(m={m})"),
        grid.region.describe(),
        &["r", "t", "eta", "xi", "check"],
        DEFAULT_TOLERANCE,
    )
    .with_constant("zeta_m", zeta);
    Ok(sweep(base, grid, |p, c| {
        let (r, t) = (p.r, p.t);
        for &eta in &nodes {
            let mut best = (f64::INFINITY, 0usize);
            for (j, &xi) in nodes.iter().enumerate() {
                let d = dtheta_dt(r, t, eta, xi);
                let lam = lambda_tilde(r, t, eta, xi);
                c.record(&[r, t, eta, xi, 0.0], d + 5.0 * zeta / (3.0 * lam));
                c.record(&[r, t, eta, xi, 1.0], -d);
                let n = n_factored(r, t, eta, xi);
                if n < best.0 {
                    best = (n, j);
                }
            }
            let a = t * eta;
            if a == 0.0 {
                continue;
            }
            let (lo, hi) = n_critical_points(r, a);
            c.record(&[r, t, eta, hi, 2.0], hi - 1.0);
            c.record(&[r, t, eta, lo, 3.0], lo);
            c.record(&[r, t, eta, lo, 4.0], 1.0 - lo);
            let j = best.1;
            let left = if j > 0 { nodes[j] - nodes[j - 1] } else { 0.0 };
            let right = if j + 1 < nodes.len() { nodes[j + 1] - nodes[j] } else { 0.0 };
            c.record(
                &[r, t, eta, nodes[j], 5.0],
                left.max(right) - (nodes[j] - lo).abs(),
            );
        }
    }))
}

/// `d_t{K w(lambda~) T_{m-1}(Theta)} >= -{E_m w/lambda~ + |w'(lambda~)|} K`
/// with `w = profile.f`, on a tensor sample of `(eta, xi)`. `K` is carried
/// in its scaled form `K / r^{m-1}`, which changes no sign.
///
/// `check`: 0 the inequality, 1 the half-range estimate of the transport
/// part (`-1/8` on `xi <= 1/2`, `-(m+1/8)` on `xi >= 1/2`, both against
/// `w/lambda~` and less `|w'|`), 2 agreement of the analytic derivative
/// with a central difference of step `1e-6 max(t, r/1000)`, as
/// `1 - err/(1e-6 scale)`.
pub fn verify_kernel_inequality(
    m: usize,
    w: &RadialProfile,
    grid: &RegionGrid,
    samples: usize,
) -> Result<Certificate> {
    let em = lemma_constants(m)?.e_m;
    let mf = m as f64;
    let nodes = unit_samples(samples);
    let base = Certificate::new(
        format!("kernel-inequality(m={m})"),
        grid.region.describe(),
        &["r", "t", "eta", "xi", "check"],
        DEFAULT_TOLERANCE,
    )
    .with_constant("E_m", em);
    let product = |r: f64, t: f64, eta: f64, xi: f64| {
        kernel_k_scaled(m, r, t, eta, xi)
            * w.f(lambda_tilde(r, t, eta, xi))
            * chebyshev_jet(m - 1, kernel_theta(r, t, eta, xi)).value
    };
    Ok(sweep(base, grid, |p, c| {
        let (r, t) = (p.r, p.t);
        // below t = 1e-3 r a step of 1e-6 t is swamped by roundoff
        let h = 1e-6 * t.max(1e-3 * r);
        for &eta in &nodes {
            for &xi in &nodes {
                let lam = lambda_tilde(r, t, eta, xi);
                let (wv, dwv) = (w.f(lam), w.df(lam));
                let k = kernel_k_scaled(m, r, t, eta, xi);
                let terms = KernelTerms::new(m, r, t, eta, xi, wv, dwv);
                let lhs = k * terms.dt_factor();
                let rhs_abs = k * (em * wv / lam + dwv.abs());
                c.record(&[r, t, eta, xi, 0.0], lhs + rhs_abs);

                let half = if xi <= 0.5 { 0.125 } else { mf + 0.125 };
                c.record(
                    &[r, t, eta, xi, 1.0],
                    terms.transport_part() + half * wv / lam + dwv.abs(),
                );

                let fd = (product(r, t + h, eta, xi) - product(r, t - h, eta, xi)) / (2.0 * h);
                let scale = lhs.abs() + k * (em * wv.abs() / lam + dwv.abs());
                let err = (fd - lhs).abs();
                let margin = if scale == 0.0 {
                    if err == 0.0 { 1.0 } else { -1.0 }
                } else {
                    1.0 - err / (1e-6 * scale)
                };
                c.record(&[r, t, eta, xi, 2.0], margin);
            }
        }
    }))
}
