//! Initial data: radial profiles `(f, g)` and general data on `R^n` for the
//! low-dimensional evaluator.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radial initial data `u(r, 0) = f(r)`, `u_t(r, 0) = g(r)` from a named
/// parametric family.
#[derive(Clone)]
pub struct RadialProfile {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    f: ScalarFn,
    df: Option<ScalarFn>,
    d2f: Option<ScalarFn>,
    g: ScalarFn,
    dg: Option<ScalarFn>,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("RadialProfile")
            .field("family", &self.family)
            .field("params", &self.params)
            .field("analytic_df", &self.df.is_some())
            .finish()
    }
}

fn fd_step(r: f64) -> f64 {
    1e-6 * (1.0 + r.abs())
}

impl RadialProfile {
    pub fn new(
        family: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RadialProfile {
            family: family.into(),
            params: BTreeMap::new(),
            f: Arc::new(f),
            df: None,
            d2f: None,
            g: Arc::new(g),
            dg: None,
        }
    }

    pub fn with_df(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.df = Some(Arc::new(df));
        self
    }

    pub fn with_d2f(mut self, d2f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2f = Some(Arc::new(d2f));
        self
    }

    pub fn with_dg(mut self, dg: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dg = Some(Arc::new(dg));
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    #[inline]
    pub fn f(&self, r: f64) -> f64 {
        (self.f)(r)
    }

    #[inline]
    pub fn g(&self, r: f64) -> f64 {
        (self.g)(r)
    }

    /// `f'(r)`, falling back to a central difference when no analytic
    /// derivative was supplied (see [`RadialProfile::has_analytic_df`]).
    #[inline]
    pub fn df(&self, r: f64) -> f64 {
        match &self.df {
            Some(d) => d(r),
            None => {
                let h = fd_step(r);
                (self.f(r + h) - self.f(r - h)) / (2.0 * h)
            }
        }
    }

    pub fn d2f(&self, r: f64) -> f64 {
        match &self.d2f {
            Some(d) => d(r),
            None => {
                let h = 1e-4 * (1.0 + r.abs());
                (self.f(r + h) - 2.0 * self.f(r) + self.f(r - h)) / (h * h)
            }
        }
    }

    pub fn dg(&self, r: f64) -> f64 {
        match &self.dg {
            Some(d) => d(r),
            None => {
                let h = fd_step(r);
                (self.g(r + h) - self.g(r - h)) / (2.0 * h)
            }
        }
    }

    pub fn has_analytic_df(&self) -> bool {
        self.df.is_some()
    }

    /// Pointwise `(f, g)` negated; used for negative controls.
    pub fn negated_g(&self) -> Self {
        let g = Arc::clone(&self.g);
        let dg = self.dg.clone();
        let mut out = self.clone();
        out.family = format!("{}-flipped-g", self.family);
        out.g = Arc::new(move |r| -g(r));
        out.dg = dg.map(|d| Arc::new(move |r: f64| -d(r)) as ScalarFn);
        out
    }

    pub fn negated(&self) -> Self {
        let (f, g) = (Arc::clone(&self.f), Arc::clone(&self.g));
        let df = self.df.clone();
        let mut out = RadialProfile::new(
            format!("{}-negated", self.family),
            move |r| -f(r),
            move |r| -g(r),
        );
        if let Some(d) = df {
            out = out.with_df(move |r| -d(r));
        }
        out.params = self.params.clone();
        out
    }

    /// Linear combination `a*self + b*other` of both data components.
    pub fn combine(&self, a: f64, other: &RadialProfile, b: f64) -> Self {
        let (f1, g1, f2, g2) = (
            Arc::clone(&self.f),
            Arc::clone(&self.g),
            Arc::clone(&other.f),
            Arc::clone(&other.g),
        );
        let mut out = RadialProfile::new(
            format!("{}*{}+{}*{}", a, self.family, b, other.family),
            move |r| a * f1(r) + b * f2(r),
            move |r| a * g1(r) + b * g2(r),
        );
        if let (Some(d1), Some(d2)) = (self.df.clone(), other.df.clone()) {
            out = out.with_df(move |r| a * d1(r) + b * d2(r));
        }
        out
    }

    /// Checks supplied derivatives against central differences at `samples`
    /// points of `[r_lo, r_hi]` (relative tolerance 1e-6).
    pub fn check_derivatives(&self, r_lo: f64, r_hi: f64, samples: usize) -> Result<()> {
        let samples = samples.max(2);
        for i in 0..samples {
            let r = r_lo + (r_hi - r_lo) * i as f64 / (samples - 1) as f64;
            let h = 1e-5 * (1.0 + r.abs());
            let mut checks: Vec<(&str, &ScalarFn, &ScalarFn)> = Vec::new();
            if let Some(df) = &self.df {
                checks.push(("f'", df, &self.f));
                if let Some(d2f) = &self.d2f {
                    checks.push(("f''", d2f, df));
                }
            }
            if let Some(dg) = &self.dg {
                checks.push(("g'", dg, &self.g));
            }
            for (name, deriv, base) in checks {
                let fd = (base(r + h) - base(r - h)) / (2.0 * h);
                let an = deriv(r);
                let scale = an.abs().max(fd.abs()).max(base(r).abs()).max(1e-300);
                if (an - fd).abs() > 1e-6 * scale {
                    return Err(Error::Profile(format!(
                        "{name} of '{}' inconsistent at r = {r}: analytic {an}, difference {fd}",
                        self.family
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Catalogue of built-in radial families.
pub mod families {
    use super::*;

    pub fn zero() -> RadialProfile {
        RadialProfile::new("zero", |_| 0.0, |_| 0.0)
            .with_df(|_| 0.0)
            .with_d2f(|_| 0.0)
            .with_dg(|_| 0.0)
    }

    pub fn constant(c: f64) -> RadialProfile {
        RadialProfile::new("constant", move |_| c, |_| 0.0)
            .with_df(|_| 0.0)
            .with_d2f(|_| 0.0)
            .with_dg(|_| 0.0)
            .with_param("c", c)
    }

    /// `f = a exp(-((r-c)/w)^2)`, `g = b exp(-((r-c)/w)^2)`.
    pub fn gaussian(a: f64, b: f64, center: f64, width: f64) -> RadialProfile {
        let e = move |r: f64| (-((r - center) / width).powi(2)).exp();
        let de = move |r: f64| -2.0 * (r - center) / (width * width) * e(r);
        let d2e = move |r: f64| {
            let s = (r - center) / width;
            (4.0 * s * s - 2.0) / (width * width) * e(r)
        };
        RadialProfile::new("gaussian", move |r| a * e(r), move |r| b * e(r))
            .with_df(move |r| a * de(r))
            .with_d2f(move |r| a * d2e(r))
            .with_dg(move |r| b * de(r))
            .with_param("a", a)
            .with_param("b", b)
            .with_param("center", center)
            .with_param("width", width)
    }

    /// `f = a (1+r)^-k`, `g = b (1+r)^(-1-k)`: the slowly decaying shape all
    /// assumption-satisfying families share.
    pub fn power_decay(a: f64, b: f64, kappa: f64) -> RadialProfile {
        RadialProfile::new(
            "power",
            move |r| a * (1.0 + r).powf(-kappa),
            move |r| b * (1.0 + r).powf(-1.0 - kappa),
        )
        .with_df(move |r| -kappa * a * (1.0 + r).powf(-1.0 - kappa))
        .with_d2f(move |r| kappa * (kappa + 1.0) * a * (1.0 + r).powf(-2.0 - kappa))
        .with_dg(move |r| -(1.0 + kappa) * b * (1.0 + r).powf(-2.0 - kappa))
        .with_param("a", a)
        .with_param("b", b)
        .with_param("kappa", kappa)
    }

    /// Velocity-only data `g = b (1+r)^(-2)`.
    pub fn velocity_power(b: f64) -> RadialProfile {
        RadialProfile::new("velocity-power", |_| 0.0, move |r| b * (1.0 + r).powi(-2))
            .with_df(|_| 0.0)
            .with_d2f(|_| 0.0)
            .with_dg(move |r| -2.0 * b * (1.0 + r).powi(-3))
            .with_param("b", b)
    }
}

/// Initial data on `R^n` (`n = 2, 3`), points padded to three components.
pub trait SpatialData: Send + Sync {
    fn f(&self, x: [f64; 3]) -> f64;
    fn grad_f(&self, x: [f64; 3]) -> [f64; 3];
    fn g(&self, x: [f64; 3]) -> f64;
}

pub fn norm(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// A radial profile viewed as data on `R^n`.
#[derive(Debug, Clone)]
pub struct RadialData(pub RadialProfile);

impl SpatialData for RadialData {
    fn f(&self, x: [f64; 3]) -> f64 {
        self.0.f(norm(x))
    }

    fn grad_f(&self, x: [f64; 3]) -> [f64; 3] {
        let r = norm(x);
        if r == 0.0 {
            return [0.0; 3];
        }
        let d = self.0.df(r) / r;
        [d * x[0], d * x[1], d * x[2]]
    }

    fn g(&self, x: [f64; 3]) -> f64 {
        self.0.g(norm(x))
    }
}

/// Plane-wave data `f = exp(-((x_1 - c)/w)^2)`, `g = 0`; the free solution is
/// `(f(x_1 + t) + f(x_1 - t))/2` in every dimension.
#[derive(Debug, Clone, Copy)]
pub struct PlaneGaussian {
    pub center: f64,
    pub width: f64,
}

impl PlaneGaussian {
    pub fn profile(&self, s: f64) -> f64 {
        (-((s - self.center) / self.width).powi(2)).exp()
    }
}

impl SpatialData for PlaneGaussian {
    fn f(&self, x: [f64; 3]) -> f64 {
        self.profile(x[0])
    }

    fn grad_f(&self, x: [f64; 3]) -> [f64; 3] {
        let d = -2.0 * (x[0] - self.center) / (self.width * self.width) * self.profile(x[0]);
        [d, 0.0, 0.0]
    }

    fn g(&self, _x: [f64; 3]) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_derivatives_are_consistent() {
        families::gaussian(1.0, 0.5, 6.0, 1.5)
            .check_derivatives(0.0, 15.0, 200)
            .unwrap();
        families::power_decay(2.0, 3.0, 0.7)
            .check_derivatives(0.0, 100.0, 200)
            .unwrap();
        families::velocity_power(1.0)
            .check_derivatives(0.0, 50.0, 50)
            .unwrap();
    }

    #[test]
    fn wrong_derivative_is_reported() {
        let bad = RadialProfile::new("bad", |r| r * r, |_| 0.0).with_df(|r| r);
        assert!(matches!(
            bad.check_derivatives(1.0, 2.0, 10),
            Err(Error::Profile(_))
        ));
    }

    #[test]
    fn fallback_derivative() {
        let p = RadialProfile::new("sq", |r| r * r, |_| 0.0);
        assert!(!p.has_analytic_df());
        assert!((p.df(3.0) - 6.0).abs() < 1e-6);
    }

    #[test]
    fn radial_gradient_points_outward() {
        let d = RadialData(families::power_decay(1.0, 0.0, 1.0));
        let x = [3.0, 4.0, 0.0];
        let gr = d.grad_f(x);
        // f' = -(1+r)^-2 at r = 5
        let expect = -1.0 / 36.0;
        assert!((gr[0] - expect * 0.6).abs() < 1e-14);
        assert!((gr[1] - expect * 0.8).abs() < 1e-14);
    }
}
