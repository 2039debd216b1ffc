//! Free solutions of the linear wave equation from exact representation
//! formulas.
//!
//! * odd `n = 2m+1`: Legendre kernel `P_{m-1}(Theta)` on `[r-t, r+t]`, with the
//!   time derivative carried inside the integral;
//! * even `n = 2m`: Chebyshev kernel `T_{m-1}` as a double integral in
//!   `(eta, xi)`, where `eta = sin(phi)` and `xi = sin^2(psi)` remove the
//!   endpoint weights `eta/sqrt(1-eta^2)` and `1/sqrt(xi(1-xi))`;
//! * `n = 2, 3` with general data: spherical means (Kirchhoff / Poisson).
//!
//! Radial evaluators are restricted to the exterior region `r > t`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{kernel_k_scaled, lambda_tilde, theta, KernelTerms};
use crate::profile::{RadialProfile, SpatialData};
use crate::quadrature::{periodic_angles, reference_rule, QuadratureSpec};
use crate::specfun::{legendre_jet, MAX_DEGREE};

/// Relative disagreement between a rule and its doubled refinement above
/// which an evaluation is flagged.
pub const QUADRATURE_WARN_REL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    /// Relative difference to the evaluation with every node count doubled.
    pub quad_tol: f64,
    pub quadrature_warning: bool,
    /// `f'` came from a finite difference rather than the profile.
    pub derivative_fallback: bool,
}

fn check_exterior(m: usize, r: f64, t: f64) -> Result<()> {
    if !(2..=MAX_DEGREE).contains(&m) {
        return Err(Error::InvalidParameter(format!(
            "m must lie in 2..={MAX_DEGREE}, got {m}"
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain {
            value: r,
            domain: "r > 0",
        });
    }
    if !(t >= 0.0 && t < r) {
        return Err(Error::Domain {
            value: t,
            domain: "0 <= t < r",
        });
    }
    Ok(())
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn with_refinement(
    q: &QuadratureSpec,
    derivative_fallback: bool,
    eval: impl Fn(&QuadratureSpec) -> Result<f64>,
) -> Result<Evaluation> {
    q.validate()?;
    let coarse = eval(q)?;
    let fine = eval(&q.doubled())?;
    let quad_tol = rel_diff(coarse, fine);
    Ok(Evaluation {
        value: fine,
        quad_tol,
        quadrature_warning: quad_tol > QUADRATURE_WARN_REL && (coarse - fine).abs() > 1e-300,
        derivative_fallback,
    })
}

/// Free solution in odd dimension `n = 2m+1` at one exterior point, with
/// the refinement check.
pub fn u0_odd(
    profile: &RadialProfile,
    m: usize,
    r: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<Evaluation> {
    check_exterior(m, r, t)?;
    with_refinement(q, false, |q| u0_odd_value(profile, m, r, t, q))
}

/// ```text
/// u0 = (1/2r^m){f(r+t)(r+t)^m + f(r-t)(r-t)^m}
///    + (1/2r^m) int lambda^m f(lambda) P'_{m-1}(Theta) (-t/(r lambda)) dlambda
///    + (1/2r^m) int lambda^m g(lambda) P_{m-1}(Theta) dlambda
/// ```
pub fn u0_odd_value(
    profile: &RadialProfile,
    m: usize,
    r: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_exterior(m, r, t)?;
    let mi = m as i32;
    let (hi, lo) = (r + t, r - t);
    let boundary = 0.5 * (profile.f(hi) * (hi / r).powi(mi) + profile.f(lo) * (lo / r).powi(mi));
    if t == 0.0 {
        return Ok(boundary);
    }
    let rule = reference_rule(q.rule, q.nodes_lambda);
    let integral = rule.integrate(lo, hi, |lam| {
        let jet = legendre_jet(m - 1, theta(lam, r, t));
        let weight = (lam / r).powi(mi);
        weight * (-profile.f(lam) * jet.d1 * t / (r * lam) + profile.g(lam) * jet.value)
    });
    Ok(boundary + 0.5 * integral)
}

/// `(1/2r^m) int_{r-t}^{r+t} lambda^m h(lambda) dlambda` on the same rule as
/// [`u0_odd_value`]; building block for lower-bound right-hand sides.
pub fn odd_moment(m: usize, r: f64, t: f64, q: &QuadratureSpec, h: impl Fn(f64) -> f64) -> f64 {
    let rule = reference_rule(q.rule, q.nodes_lambda);
    0.5 * rule.integrate(r - t, r + t, |lam| (lam / r).powi(m as i32) * h(lam))
}

/// Free solution in even dimension `n = 2m` at one exterior point, with the
/// refinement check.
pub fn u0_even(
    profile: &RadialProfile,
    m: usize,
    r: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<Evaluation> {
    check_exterior(m, r, t)?;
    with_refinement(q, !profile.has_analytic_df(), |q| {
        u0_even_value(profile, m, r, t, q)
    })
}

/// Tensor-product nodes `(eta, xi, weight)` with both endpoint weights
/// absorbed: `eta d eta / sqrt(1-eta^2) = sin(phi) d phi` and
/// `d xi / sqrt(xi (1-xi)) = 2 d psi`.
pub fn eta_xi_nodes(q: &QuadratureSpec) -> Vec<(f64, f64, f64)> {
    let eta_rule = reference_rule(q.rule, q.nodes_eta);
    let xi_rule = reference_rule(q.rule, q.nodes_xi);
    let mut out = Vec::with_capacity(q.nodes_eta * q.nodes_xi);
    for (phi, wphi) in eta_rule.mapped(0.0, FRAC_PI_2) {
        let eta = phi.sin();
        for (psi, wpsi) in xi_rule.mapped(0.0, FRAC_PI_2) {
            let s = psi.sin();
            out.push((eta, s * s, wphi * eta * 2.0 * wpsi));
        }
    }
    out
}

/// ```text
/// u0 = (2/(pi r^{m-1})) [ d/dt I(r,t,f) + I(r,t,g) ]
/// I      = (t/2) int int K psi(lambda~) T_{m-1}(Theta)
/// d/dt I = (1/2) int int { K f T + t K [eta (I1+I2+I3+I4) T + I5] }
/// ```
/// against the measure `eta/sqrt(1-eta^2) d eta  d xi/sqrt(xi(1-xi))`.
pub fn u0_even_value(
    profile: &RadialProfile,
    m: usize,
    r: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_exterior(m, r, t)?;
    let mut acc = 0.0;
    for (eta, xi, w) in eta_xi_nodes(q) {
        let lam = lambda_tilde(r, t, eta, xi);
        let k = kernel_k_scaled(m, r, t, eta, xi);
        let (f, df, g) = (profile.f(lam), profile.df(lam), profile.g(lam));
        let terms = KernelTerms::new(m, r, t, eta, xi, f, df);
        let integrand = k * (f * terms.t_val + t * terms.dt_factor() + t * g * terms.t_val);
        acc += w * integrand;
    }
    Ok(acc / PI)
}

/// `(t/(2 pi r^{m-1})) int int K h(lambda~)` over the `(eta, xi)` measure:
/// the original-variable double integral with weight
/// `rho/sqrt(t^2-rho^2) * lambda^m/sqrt(..)sqrt(..)`, divided by `pi r^{m-1}`.
pub fn even_moment(m: usize, r: f64, t: f64, q: &QuadratureSpec, h: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for (eta, xi, w) in eta_xi_nodes(q) {
        let lam = lambda_tilde(r, t, eta, xi);
        acc += w * kernel_k_scaled(m, r, t, eta, xi) * h(lam);
    }
    t * acc / (2.0 * PI)
}

/// Spatial dimension of the low-dimensional evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LowDim {
    Two,
    Three,
}

impl LowDim {
    pub fn from_n(n: usize) -> Result<Self> {
        match n {
            2 => Ok(LowDim::Two),
            3 => Ok(LowDim::Three),
            _ => Err(Error::InvalidParameter(format!(
                "low-dimensional evaluator needs n = 2 or 3, got {n}"
            ))),
        }
    }

    pub fn n(self) -> usize {
        match self {
            LowDim::Two => 2,
            LowDim::Three => 3,
        }
    }
}

/// Unit directions with weights summing to the measure of the unit sphere
/// (`4 pi` in 3D, `2 pi` for the circle).
pub fn sphere_nodes(dim: LowDim, q: &QuadratureSpec) -> Vec<([f64; 3], f64)> {
    match dim {
        LowDim::Three => {
            let mu_rule = reference_rule(q.rule, q.nodes_eta);
            let mut out = Vec::with_capacity(q.nodes_eta * q.nodes_xi);
            for (mu, wmu) in mu_rule.mapped(-1.0, 1.0) {
                let s = (1.0 - mu * mu).max(0.0).sqrt();
                for (phi, wphi) in periodic_angles(q.nodes_xi) {
                    out.push(([s * phi.cos(), s * phi.sin(), mu], wmu * wphi));
                }
            }
            out
        }
        LowDim::Two => periodic_angles(q.nodes_xi)
            .map(|(phi, w)| ([phi.cos(), phi.sin(), 0.0], w))
            .collect(),
    }
}

/// Radial nodes `(xi, weight)` for the disc average in 2D:
/// `xi d xi / sqrt(1 - xi^2) = sin(alpha) d alpha` with `xi = sin(alpha)`.
fn disc_radial_nodes(q: &QuadratureSpec) -> Vec<(f64, f64)> {
    reference_rule(q.rule, q.nodes_eta)
        .mapped(0.0, FRAC_PI_2)
        .map(|(alpha, w)| (alpha.sin(), w * alpha.sin()))
        .collect()
}

fn shifted(x: [f64; 3], s: f64, w: [f64; 3]) -> [f64; 3] {
    [x[0] + s * w[0], x[1] + s * w[1], x[2] + s * w[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Riemann operator `R(phi | x, t)`:
/// `t/(4 pi) int_{|w|=1} phi(x + t w)` in 3D,
/// `(1/2 pi) int_0^t rho / sqrt(t^2 - rho^2) int_{|w|=1} phi(x + rho w)` in 2D.
pub fn riemann_operator(
    dim: LowDim,
    x: [f64; 3],
    t: f64,
    q: &QuadratureSpec,
    phi: impl Fn([f64; 3]) -> f64,
) -> f64 {
    let dirs = sphere_nodes(dim, q);
    match dim {
        LowDim::Three => {
            let s: f64 = dirs.iter().map(|&(w, wt)| wt * phi(shifted(x, t, w))).sum();
            t * s / (4.0 * PI)
        }
        LowDim::Two => {
            let mut acc = 0.0;
            for (xi, wxi) in disc_radial_nodes(q) {
                let s: f64 = dirs
                    .iter()
                    .map(|&(w, wt)| wt * phi(shifted(x, t * xi, w)))
                    .sum();
                acc += wxi * s;
            }
            t * acc / (2.0 * PI)
        }
    }
}

/// Free solution in `n = 2, 3` for general data, with the refinement check.
pub fn u0_low(
    data: &dyn SpatialData,
    dim: LowDim,
    x: [f64; 3],
    t: f64,
    q: &QuadratureSpec,
) -> Result<Evaluation> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            value: t,
            domain: "t >= 0",
        });
    }
    with_refinement(q, false, |q| Ok(u0_low_value(data, dim, x, t, q)))
}

/// `u0 = d_t R(f) + R(g)` expanded as
/// `(1/4pi) int {f + t w.grad f + t g}(x + t w)` (3D) and
/// `(1/2pi) int xi/sqrt(1-xi^2) int {f + t xi w.grad f + t g}(x + t xi w)` (2D).
pub fn u0_low_value(
    data: &dyn SpatialData,
    dim: LowDim,
    x: [f64; 3],
    t: f64,
    q: &QuadratureSpec,
) -> f64 {
    let dirs = sphere_nodes(dim, q);
    let sphere_sum = |s: f64| -> f64 {
        dirs.iter()
            .map(|&(w, wt)| {
                let y = shifted(x, s, w);
                wt * (data.f(y) + s * dot(w, data.grad_f(y)) + t * data.g(y))
            })
            .sum()
    };
    match dim {
        LowDim::Three => sphere_sum(t) / (4.0 * PI),
        LowDim::Two => {
            let acc: f64 = disc_radial_nodes(q)
                .into_iter()
                .map(|(xi, wxi)| wxi * sphere_sum(t * xi))
                .sum();
            acc / (2.0 * PI)
        }
    }
}

/// Outcome of [`refine_until`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Refined {
    pub value: f64,
    pub achieved_rel_tol: f64,
    pub spec: QuadratureSpec,
    /// `false` when the node cap was hit first (`NoConvergence`).
    pub converged: bool,
}

/// Doubles every node count until two successive values agree to
/// `target_rel_tol` or the per-axis cap is reached.
pub fn refine_until(
    start: &QuadratureSpec,
    target_rel_tol: f64,
    op: impl Fn(&QuadratureSpec) -> Result<f64>,
) -> Result<Refined> {
    if !(target_rel_tol >= 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "target tolerance {target_rel_tol} below 1e-12"
        )));
    }
    start.validate()?;
    let mut spec = *start;
    let mut value = op(&spec)?;
    loop {
        if spec.at_cap() {
            return Ok(Refined {
                value,
                achieved_rel_tol: f64::NAN,
                spec,
                converged: false,
            });
        }
        let next = spec.doubled();
        let next_value = op(&next)?;
        let diff = rel_diff(value, next_value);
        spec = next;
        value = next_value;
        if diff <= target_rel_tol {
            return Ok(Refined {
                value,
                achieved_rel_tol: diff,
                spec,
                converged: true,
            });
        }
        if spec.at_cap() {
            return Ok(Refined {
                value,
                achieved_rel_tol: diff,
                spec,
                converged: false,
            });
        }
    }
}

/// Closed-form radial reduction in 3D for `r > t`:
/// `((r+t)f(r+t) + (r-t)f(r-t))/(2r) + (1/2r) int_{r-t}^{r+t} lambda g`.
pub fn radial_dalembert_3d(profile: &RadialProfile, r: f64, t: f64, q: &QuadratureSpec) -> f64 {
    let rule = reference_rule(q.rule, q.nodes_lambda);
    let boundary = ((r + t) * profile.f(r + t) + (r - t) * profile.f(r - t)) / (2.0 * r);
    boundary + rule.integrate(r - t, r + t, |l| l * profile.g(l)) / (2.0 * r)
}
