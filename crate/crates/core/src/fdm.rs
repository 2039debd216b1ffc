//! Leapfrog finite-difference solver for the radial equation
//! `u_tt = u_rr + ((n-1)/r) u_r + F(u) + S(r, t)` on a truncated domain.
//!
//! The radial Laplacian is discretized in flux form,
//!
//! ```text
//! (L u)_i = [ r_{i+1/2}^{n-1}(u_{i+1}-u_i) - r_{i-1/2}^{n-1}(u_i-u_{i-1}) ] / (r_i^{n-1} dr^2)
//! (L u)_0 = 2n (u_1 - u_0) / dr^2                       (limit u_tt = n u_rr)
//! ```
//!
//! which is second order, kills constants exactly, and is symmetric in the
//! `r^{n-1}` inner product so the leapfrog energy is conserved. The outer
//! node carries a zero-flux condition; `r_max` must be large enough that its
//! reflection never reaches a reported point.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::freewave::{u0_even_value, u0_odd_value};
use crate::profile::RadialProfile;
use crate::quadrature::QuadratureSpec;

pub type SourceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Nonlinearity `F`. The power law uses `A |s|^p`, which equals `A s^p` on
/// `s >= 0`.
#[derive(Clone)]
pub enum Nonlinearity {
    Zero,
    Power { a: f64, p: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Nonlinearity::Zero => write!(f, "Zero"),
            Nonlinearity::Power { a, p } => write!(f, "Power {{ a: {a}, p: {p} }}"),
            Nonlinearity::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Nonlinearity {
    pub fn power(a: f64, p: f64) -> Result<Self> {
        if !(a >= 0.0) || !(p > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "power nonlinearity needs A >= 0 and p > 1 (A = {a}, p = {p})"
            )));
        }
        Ok(Nonlinearity::Power { a, p })
    }

    /// Accepts a general `F` after checking `F >= 0` and monotonicity on
    /// sampled points of `[0, s_max]`.
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static, s_max: f64) -> Result<Self> {
        let mut prev = f(0.0);
        if !(prev >= 0.0) {
            return Err(Error::InvalidParameter("F(0) must be >= 0".into()));
        }
        for i in 1..=1000 {
            let s = s_max * i as f64 / 1000.0;
            let v = f(s);
            if !(v >= 0.0) || v < prev {
                return Err(Error::InvalidParameter(format!(
                    "F must be nonnegative and nondecreasing on [0, {s_max}] (fails at s = {s})"
                )));
            }
            prev = v;
        }
        Ok(Nonlinearity::Custom(Arc::new(f)))
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::Power { a, p } => a * s.abs().powf(*p),
            Nonlinearity::Custom(f) => f(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Nonlinearity::Zero)
    }
}

#[derive(Clone)]
pub struct FdmConfig {
    pub n: usize,
    pub r_max: f64,
    pub dr: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub nonlinearity: Nonlinearity,
    pub blowup_cutoff: f64,
    pub source: Option<SourceFn>,
    /// Times at which the whole field is kept.
    pub snapshots: Vec<f64>,
}

impl std::fmt::Debug for FdmConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FdmConfig")
            .field("n", &self.n)
            .field("r_max", &self.r_max)
            .field("dr", &self.dr)
            .field("cfl", &self.cfl)
            .field("t_end", &self.t_end)
            .field("nonlinearity", &self.nonlinearity)
            .field("blowup_cutoff", &self.blowup_cutoff)
            .field("source", &self.source.is_some())
            .field("snapshots", &self.snapshots)
            .finish()
    }
}

impl FdmConfig {
    pub fn new(n: usize, r_max: f64, dr: f64, t_end: f64) -> Self {
        FdmConfig {
            n,
            r_max,
            dr,
            cfl: 0.5,
            t_end,
            nonlinearity: Nonlinearity::Zero,
            blowup_cutoff: 1e8,
            source: None,
            snapshots: vec![t_end],
        }
    }

    /// Domain sized so that the outer boundary cannot influence any of
    /// `points` before `max t`.
    pub fn for_points(n: usize, points: &[(f64, f64)], dr: f64) -> Self {
        let t_end = points.iter().map(|p| p.1).fold(0.0, f64::max);
        let r_far = points.iter().map(|p| p.0).fold(0.0, f64::max);
        let r_max = r_far + 2.0 * t_end + 10.0 * dr + 1.0;
        let mut snaps: Vec<f64> = points.iter().map(|p| p.1).collect();
        snaps.sort_by(f64::total_cmp);
        snaps.dedup();
        let mut cfg = FdmConfig::new(n, r_max, dr, t_end);
        cfg.snapshots = snaps;
        cfg
    }

    fn len(&self) -> usize {
        (self.r_max / self.dr).round() as usize + 1
    }

    /// `cfl * dr`, reduced where needed so that `dt^2 rho <= 0.81 * 4` with
    /// `rho` a Gershgorin bound on the discrete Laplacian. The cells next to
    /// the origin get stiffer as `n` grows, so for `n > 3` the step can be
    /// well below `cfl * dr`.
    pub fn dt(&self) -> f64 {
        let rho = Stencil::new(self.n, self.dr, self.len()).spectral_bound();
        (self.cfl * self.dr).min(1.8 / rho.sqrt())
    }

    /// Points with `r <= r_max - t_end - dr` are outside the boundary's
    /// domain of dependence up to `t_end`.
    pub fn trusted_radius(&self) -> f64 {
        self.r_max - self.t_end - self.dr
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        if !(self.dr > 0.0) || !(self.r_max > 4.0 * self.dr) {
            return Err(Error::Config(format!(
                "need dr > 0 and r_max > 4 dr (dr = {}, r_max = {})",
                self.dr, self.r_max
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(Error::Config(format!("cfl = {} not in (0, 0.9]", self.cfl)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end = {} must be >= 0", self.t_end)));
        }
        if self.snapshots.iter().any(|&s| !(s >= 0.0 && s <= self.t_end)) {
            return Err(Error::Config("snapshot times must lie in [0, t_end]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FdmStatus {
    Completed,
    /// `max |u|` exceeded the cutoff at this time; not a blow-up time claim.
    CutoffHit(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FdmSolution {
    pub n: usize,
    pub dr: f64,
    pub dt: f64,
    pub steps: usize,
    pub status: FdmStatus,
    pub snapshots: Vec<Snapshot>,
    /// Leapfrog energy `E^{k+1/2}` after every step.
    pub energy: Vec<f64>,
}

impl FdmSolution {
    /// Cubic interpolation in `r` of the snapshot taken at `t`.
    pub fn sample(&self, r: f64, t: f64) -> Option<f64> {
        let snap = self
            .snapshots
            .iter()
            .find(|s| (s.t - t).abs() <= 1e-12 * (1.0 + t))?;
        Some(interp_cubic(&snap.u, self.dr, r))
    }

    /// Relative energy drift `max_k |E_k - E_0| / |E_0|`.
    pub fn energy_drift(&self) -> f64 {
        let Some(&e0) = self.energy.first() else {
            return 0.0;
        };
        let worst = self
            .energy
            .iter()
            .map(|e| (e - e0).abs())
            .fold(0.0, f64::max);
        if e0 == 0.0 {
            worst
        } else {
            worst / e0.abs()
        }
    }

    /// `r,t,u` rows for every snapshot.
    pub fn snapshots_csv(&self) -> String {
        let mut out = String::from("r,t,u\n");
        for s in &self.snapshots {
            for (i, u) in s.u.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", i as f64 * self.dr, s.t, u);
            }
        }
        out
    }
}

fn interp_cubic(u: &[f64], dr: f64, r: f64) -> f64 {
    let x = r / dr;
    let last = u.len() - 1;
    let i = (x.floor() as isize).clamp(1, last as isize - 2) as usize;
    let s = x - i as f64;
    let (a, b, c, d) = (u[i - 1], u[i], u[i + 1], u[i + 2]);
    // Lagrange on nodes -1, 0, 1, 2
    let l0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    let l1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    let l2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    let l3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    a * l0 + b * l1 + c * l2 + d * l3
}

/// Metric data of the flux-form Laplacian.
struct Stencil {
    /// `r_{i+1/2}^{n-1} / (r_i^{n-1} dr^2)`, `r_{i-1/2}^{n-1} / (r_i^{n-1} dr^2)`
    up: Vec<f64>,
    down: Vec<f64>,
    /// cell volumes (energy weights)
    vol: Vec<f64>,
    /// face weights `r_{i+1/2}^{n-1} dr`
    face: Vec<f64>,
}

impl Stencil {
    fn new(n: usize, dr: f64, len: usize) -> Self {
        let k = (n - 1) as i32;
        let last = len - 1;
        let face: Vec<f64> = (0..last)
            .map(|i| ((i as f64 + 0.5) * dr).powi(k) * dr)
            .collect();
        let mut vol = vec![0.0; len];
        vol[0] = (0.5 * dr).powi(n as i32) / n as f64;
        for (i, v) in vol.iter_mut().enumerate().skip(1) {
            *v = (i as f64 * dr).powi(k) * dr;
        }
        vol[last] *= 0.5;
        let mut up = vec![0.0; len];
        let mut down = vec![0.0; len];
        for i in 0..len {
            if i < last {
                up[i] = face[i] / (vol[i] * dr * dr);
            }
            if i > 0 {
                down[i] = face[i - 1] / (vol[i] * dr * dr);
            }
        }
        Stencil {
            up,
            down,
            vol,
            face,
        }
    }

    /// Gershgorin bound on the spectrum of the symmetrized operator.
    fn spectral_bound(&self) -> f64 {
        let len = self.up.len();
        (0..len)
            .map(|i| {
                let mut b = self.up[i] + self.down[i];
                if i + 1 < len {
                    b += (self.up[i] * self.down[i + 1]).sqrt();
                }
                if i > 0 {
                    b += (self.down[i] * self.up[i - 1]).sqrt();
                }
                b
            })
            .fold(0.0, f64::max)
    }

    #[inline]
    fn apply(&self, u: &[f64], i: usize) -> f64 {
        let mut acc = 0.0;
        if i + 1 < u.len() {
            acc += self.up[i] * (u[i + 1] - u[i]);
        }
        if i > 0 {
            acc -= self.down[i] * (u[i] - u[i - 1]);
        }
        acc
    }

    fn energy(&self, old: &[f64], new: &[f64], dt: f64, dr: f64) -> f64 {
        let kinetic: f64 = self
            .vol
            .iter()
            .zip(old.iter().zip(new))
            .map(|(w, (a, b))| w * ((b - a) / dt).powi(2))
            .sum();
        let potential: f64 = self
            .face
            .iter()
            .enumerate()
            .map(|(i, w)| w * (new[i + 1] - new[i]) * (old[i + 1] - old[i]) / (dr * dr))
            .sum();
        0.5 * (kinetic + potential)
    }
}

fn quadratic_in_time(prev: &[f64], cur: &[f64], next: &[f64], s: f64) -> Vec<f64> {
    // nodes at -1, 0, 1 (in units of dt), s measured from cur
    let lm = 0.5 * s * (s - 1.0);
    let l0 = 1.0 - s * s;
    let lp = 0.5 * s * (s + 1.0);
    prev.iter()
        .zip(cur.iter().zip(next))
        .map(|(a, (b, c))| lm * a + l0 * b + lp * c)
        .collect()
}

/// Runs the leapfrog scheme to `cfg.t_end` (or until the cutoff).
pub fn solve(profile: &RadialProfile, cfg: &FdmConfig) -> Result<FdmSolution> {
    cfg.validate()?;
    let dr = cfg.dr;
    let dt = cfg.dt();
    let len = cfg.len();
    let r: Vec<f64> = (0..len).map(|i| i as f64 * dr).collect();
    let stencil = Stencil::new(cfg.n, dr, len);
    let force = |u: f64, ri: f64, t: f64| -> f64 {
        let mut v = cfg.nonlinearity.eval(u);
        if let Some(s) = &cfg.source {
            v += s(ri, t);
        }
        v
    };

    let mut snaps_pending: Vec<f64> = cfg.snapshots.clone();
    snaps_pending.sort_by(f64::total_cmp);
    snaps_pending.dedup();
    let mut snapshots = Vec::new();

    let cur: Vec<f64> = r.iter().map(|&x| profile.f(x)).collect();
    let vel: Vec<f64> = r.iter().map(|&x| profile.g(x)).collect();
    let mut pending = snaps_pending.into_iter().peekable();
    while let Some(&ts) = pending.peek() {
        if ts <= 0.0 {
            snapshots.push(Snapshot { t: ts, u: cur.clone() });
            pending.next();
        } else {
            break;
        }
    }

    let steps = (cfg.t_end / dt).ceil() as usize;
    let mut energy = Vec::with_capacity(steps);
    if steps == 0 {
        return Ok(FdmSolution {
            n: cfg.n,
            dr,
            dt,
            steps,
            status: FdmStatus::Completed,
            snapshots,
            energy,
        });
    }

    // Taylor start: u^1 = f + dt g + dt^2/2 (L f + F(f) + S(r, 0))
    let first: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|i| {
            cur[i]
                + dt * vel[i]
                + 0.5 * dt * dt * (stencil.apply(&cur, i) + force(cur[i], r[i], 0.0))
        })
        .collect();
    energy.push(stencil.energy(&cur, &first, dt, dr));

    let mut prev = cur;
    let mut cur = first;
    let mut status = FdmStatus::Completed;
    // levels: prev = k-1, cur = k at time k dt
    for k in 1..=steps {
        let t_cur = k as f64 * dt;
        if cur.iter().any(|v| !v.is_finite() || v.abs() > cfg.blowup_cutoff) {
            status = FdmStatus::CutoffHit(t_cur);
            break;
        }
        let next: Vec<f64> = (0..len)
            .into_par_iter()
            .map(|i| {
                2.0 * cur[i] - prev[i]
                    + dt * dt * (stencil.apply(&cur, i) + force(cur[i], r[i], t_cur))
            })
            .collect();
        // snapshots with t in (t_{k-1}, t_k] use the three levels k-1, k, k+1
        while let Some(&ts) = pending.peek() {
            if ts <= t_cur + 1e-12 * (1.0 + t_cur) {
                let s = (ts - t_cur) / dt;
                snapshots.push(Snapshot {
                    t: ts,
                    u: quadratic_in_time(&prev, &cur, &next, s),
                });
                pending.next();
            } else {
                break;
            }
        }
        if k == steps {
            break;
        }
        energy.push(stencil.energy(&cur, &next, dt, dr));
        prev = cur;
        cur = next;
    }
    Ok(FdmSolution {
        n: cfg.n,
        dr,
        dt,
        steps,
        status,
        snapshots,
        energy,
    })
}

/// Compares the solver against the representation formula with
/// `|u_FDM - u_rep| <= max(1e-3 |u_rep|, 5 dr^2)` at every point.
///
/// The representation uses `m` with the parity of `cfg.n`; passing an `m`
/// that does not match the dimension is a deliberate negative control.
pub fn compare_with_representation(
    profile: &RadialProfile,
    m: usize,
    points: &[(f64, f64)],
    cfg: &FdmConfig,
    q: &QuadratureSpec,
) -> Result<Certificate> {
    let mut cfg = cfg.clone();
    let mut snaps: Vec<f64> = points.iter().map(|p| p.1).collect();
    snaps.extend(cfg.snapshots.iter().copied());
    snaps.sort_by(f64::total_cmp);
    snaps.dedup();
    cfg.snapshots = snaps;
    cfg.t_end = cfg.t_end.max(points.iter().map(|p| p.1).fold(0.0, f64::max));
    if let Some(&(r, _)) = points.iter().find(|p| p.0 > cfg.trusted_radius()) {
        return Err(Error::Config(format!(
            "point r = {r} lies within reach of the outer boundary (r_max = {})",
            cfg.r_max
        )));
    }
    let sol = solve(profile, &cfg)?;
    let floor = 5.0 * cfg.dr * cfg.dr;
    let even = cfg.n % 2 == 0;
    let base = Certificate::new(
        format!("fdm-vs-representation(n={}, m={m})", cfg.n),
        "listed points",
        &["r", "t", "u_fdm", "u_rep"],
        0.0,
    )
    .with_constant("dr", cfg.dr)
    .with_constant("abs_floor", floor);
    let parts: Vec<Certificate> = points
        .par_iter()
        .map(|&(r, t)| -> Result<Certificate> {
            let rep = if even {
                u0_even_value(profile, m, r, t, q)?
            } else {
                u0_odd_value(profile, m, r, t, q)?
            };
            let fdm = sol.sample(r, t).ok_or_else(|| {
                Error::Config(format!("no snapshot for t = {t}"))
            })?;
            let allowed = (1e-3 * rep.abs()).max(floor);
            let mut c = base.empty_like();
            c.record(&[r, t, fdm, rep], allowed - (fdm - rep).abs());
            Ok(c)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(base, Certificate::merge))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewave::radial_dalembert_3d;
    use crate::profile::families;

    #[test]
    fn constants_are_preserved_exactly() {
        let mut cfg = FdmConfig::new(5, 10.0, 0.05, 3.0);
        cfg.snapshots = vec![1.0, 3.0];
        let sol = solve(&families::constant(1.0), &cfg).unwrap();
        assert_eq!(sol.status, FdmStatus::Completed);
        for s in &sol.snapshots {
            assert!(s.u.iter().all(|&v| v == 1.0), "t = {}", s.t);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let sol = solve(&families::zero(), &FdmConfig::new(4, 10.0, 0.1, 2.0)).unwrap();
        assert!(sol.snapshots[0].u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn three_dimensional_gaussian_matches_dalembert() {
        let p = families::gaussian(1.0, 0.0, 8.0, 1.0);
        let q = QuadratureSpec::default();
        let mut errs = Vec::new();
        for dr in [0.04, 0.02] {
            let mut cfg = FdmConfig::new(3, 30.0, dr, 4.0);
            cfg.snapshots = vec![4.0];
            let sol = solve(&p, &cfg).unwrap();
            let err = [6.0, 8.0, 10.0, 12.0, 13.0]
                .iter()
                .map(|&r| (sol.sample(r, 4.0).unwrap() - radial_dalembert_3d(&p, r, 4.0, &q)).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < 5.0 * 0.02 * 0.02, "{errs:?}");
        assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
    }

    #[test]
    fn config_validation() {
        let mut cfg = FdmConfig::new(3, 10.0, 0.1, 2.0);
        cfg.cfl = 0.95;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = FdmConfig::new(3, 0.3, 0.1, 2.0);
        assert!(cfg.validate().is_err());
        assert!(Nonlinearity::power(1.0, 1.0).is_err());
        assert!(Nonlinearity::custom(|s| -s, 10.0).is_err());
        assert!(Nonlinearity::custom(|s| s * s, 10.0).is_ok());
    }

    #[test]
    fn cutoff_is_reported() {
        let mut cfg = FdmConfig::new(3, 20.0, 0.1, 10.0);
        cfg.nonlinearity = Nonlinearity::power(1.0, 3.0).unwrap();
        cfg.blowup_cutoff = 1e6;
        let sol = solve(&families::constant(2.0), &cfg).unwrap();
        // u'' = u^3 from u = 2 at rest blows up at t = 0.927
        match sol.status {
            FdmStatus::CutoffHit(t) => assert!(t > 0.85 && t < 1.2, "t = {t}"),
            other => panic!("expected cutoff, got {other:?}"),
        }
    }

    #[test]
    fn leapfrog_energy_is_conserved() {
        let p = families::gaussian(1.0, 0.3, 6.0, 1.0);
        for n in [2, 3, 5] {
            let mut cfg = FdmConfig::new(n, 20.0, 0.05, 30.0);
            cfg.cfl = 0.8;
            let sol = solve(&p, &cfg).unwrap();
            // runs long enough to reflect off both ends
            assert!(sol.energy_drift() < 1e-10, "n={n}: {}", sol.energy_drift());
            assert!(sol.dt <= 0.8 * 0.05);
        }
    }

    #[test]
    fn manufactured_solution_converges_at_second_order() {
        let n = 4;
        let phi = |r: f64| (-(r - 5.0) * (r - 5.0)).exp();
        let dphi = move |r: f64| -2.0 * (r - 5.0) * phi(r);
        let d2phi = move |r: f64| (4.0 * (r - 5.0) * (r - 5.0) - 2.0) * phi(r);
        let p = RadialProfile::new("mms", phi, phi);
        let source: SourceFn = Arc::new(move |r: f64, t: f64| {
            let lap = if r == 0.0 {
                n as f64 * d2phi(0.0)
            } else {
                d2phi(r) + (n as f64 - 1.0) * dphi(r) / r
            };
            -(1.0 + t) * lap
        });
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&dr| {
                let mut cfg = FdmConfig::new(n, 14.0, dr, 2.0);
                cfg.source = Some(source.clone());
                let sol = solve(&p, &cfg).unwrap();
                sol.snapshots[0]
                    .u
                    .iter()
                    .enumerate()
                    .take_while(|(i, _)| *i as f64 * dr <= 10.0)
                    .map(|(i, u)| (u - 3.0 * phi(i as f64 * dr)).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.8, "{errs:?}");
        }
    }

    #[test]
    fn larger_data_stays_larger() {
        let lo = families::gaussian(0.5, 0.0, 5.0, 1.0);
        let hi = families::gaussian(0.5, 0.2, 5.0, 1.0).combine(1.0, &families::constant(0.1), 1.0);
        let mut cfg = FdmConfig::new(3, 20.0, 0.05, 1.0);
        cfg.nonlinearity = Nonlinearity::power(1.0, 2.0).unwrap();
        cfg.snapshots = vec![0.5, 1.0];
        let a = solve(&lo, &cfg).unwrap();
        let b = solve(&hi, &cfg).unwrap();
        for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
            for r in [2.0, 4.0, 5.0, 6.0, 8.0] {
                assert!(sb.u[(r / cfg.dr) as usize] >= sa.u[(r / cfg.dr) as usize]);
            }
        }
    }

    #[test]
    fn agrees_with_representation_and_rejects_wrong_m() {
        let p = families::gaussian(1.0, 0.5, 8.0, 1.0);
        let q = QuadratureSpec::default();
        let pts = [(6.0, 1.0), (8.0, 2.0), (10.0, 3.0), (12.0, 2.5)];
        for (n, m) in [(5, 2), (4, 2)] {
            let cfg = FdmConfig::for_points(n, &pts, 0.01);
            let good = compare_with_representation(&p, m, &pts, &cfg, &q).unwrap();
            assert!(good.certified(), "{}", good.summary());
            let bad = compare_with_representation(&p, m + 1, &pts, &cfg, &q).unwrap();
            assert!(!bad.certified(), "{}", bad.summary());
        }
    }
}
