//! Kernel algebra of the even-dimensional representation after the change of
//! variables `xi = (r + rho - lambda)/(2 rho)`, `rho = t eta`.
//!
//! Everything is written in terms of the shifted radius
//! `lambda~ = r + t eta - 2 t eta xi`, see [`lambda_tilde`].

use crate::specfun::chebyshev_jet;

/// `(lambda^2 + r^2 - t^2) / (2 r lambda)`.
#[inline]
pub fn theta(lambda: f64, r: f64, t: f64) -> f64 {
    (lambda * lambda + r * r - t * t) / (2.0 * r * lambda)
}

/// `r + t eta - 2 t eta xi`.
#[inline]
pub fn lambda_tilde(r: f64, t: f64, eta: f64, xi: f64) -> f64 {
    r + t * eta - 2.0 * t * eta * xi
}

#[inline]
pub fn kernel_theta(r: f64, t: f64, eta: f64, xi: f64) -> f64 {
    theta(lambda_tilde(r, t, eta, xi), r, t * eta)
}

/// `K = lambda~^m / (sqrt(r + t eta - t eta xi) sqrt(r - xi t eta))`.
#[inline]
pub fn kernel_k(m: usize, r: f64, t: f64, eta: f64, xi: f64) -> f64 {
    let a = t * eta;
    lambda_tilde(r, t, eta, xi).powi(m as i32) / ((r + a - a * xi).sqrt() * (r - xi * a).sqrt())
}

/// `K / r^(m-1)`, which stays O(1) for large `r`.
#[inline]
pub fn kernel_k_scaled(m: usize, r: f64, t: f64, eta: f64, xi: f64) -> f64 {
    let a = t * eta;
    let lam = lambda_tilde(r, t, eta, xi);
    (lam / r).powi(m as i32) * r / ((r + a - a * xi).sqrt() * (r - xi * a).sqrt())
}

/// `N` as it arises from differentiating the kernel argument in `t`.
pub fn n_definition(r: f64, t: f64, eta: f64, xi: f64) -> f64 {
    let lam = lambda_tilde(r, t, eta, xi);
    let a = t * eta;
    (2.0 * lam * (1.0 - 2.0 * xi) - 2.0 * a) * lam
        - (lam * lam + r * r - a * a) * (1.0 - 2.0 * xi)
}

/// `-8 a^2 xi^3 + (12 a^2 + 8 r a) xi^2 - (8 r a + 4 a^2) xi` with `a = t eta`.
pub fn n_expanded(r: f64, t: f64, eta: f64, xi: f64) -> f64 {
    let a = t * eta;
    -8.0 * a * a * xi.powi(3) + (12.0 * a * a + 8.0 * r * a) * xi * xi
        - (8.0 * r * a + 4.0 * a * a) * xi
}

/// `-4 a xi (xi - 1)(2 a xi - (2 r + a))`.
#[inline]
pub fn n_factored(r: f64, t: f64, eta: f64, xi: f64) -> f64 {
    let a = t * eta;
    -4.0 * a * xi * (xi - 1.0) * (2.0 * a * xi - (2.0 * r + a))
}

/// Sum of absolute values of the monomials of [`n_expanded`]; the natural
/// scale for comparing the three forms of `N`.
pub fn n_scale(r: f64, t: f64, eta: f64, xi: f64) -> f64 {
    let a = t * eta;
    8.0 * a * a * xi.abs().powi(3)
        + (12.0 * a * a + 8.0 * r * a) * xi * xi
        + (8.0 * r * a + 4.0 * a * a) * xi.abs()
}

/// `d/dt Theta(r, t, eta, xi) = eta N / (2 r lambda~^2)`.
#[inline]
pub fn dtheta_dt(r: f64, t: f64, eta: f64, xi: f64) -> f64 {
    let lam = lambda_tilde(r, t, eta, xi);
    eta * n_factored(r, t, eta, xi) / (2.0 * r * lam * lam)
}

/// Critical points of `N` in `xi` for fixed `a = t eta > 0`: `(xi_-, xi_+)`.
pub fn n_critical_points(r: f64, a: f64) -> (f64, f64) {
    let s = (3.0 * a * a + 4.0 * r * r).sqrt();
    let b = 3.0 * a + 2.0 * r;
    // xi_- = (b - s)/(6a) = (b^2 - s^2)/(6a (b + s)), free of cancellation
    let minus = (b * b - s * s) / (6.0 * a * (b + s));
    (minus, (b + s) / (6.0 * a))
}

/// Pieces of `d/dt {K w(lambda~) T_{m-1}(Theta)} = K {eta (I1+I2+I3+I4) T + I5}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTerms {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
    /// `T_{m-1}(Theta)`
    pub t_val: f64,
    pub lambda: f64,
    pub eta: f64,
}

impl KernelTerms {
    pub fn new(m: usize, r: f64, t: f64, eta: f64, xi: f64, w: f64, dw: f64) -> Self {
        let a = t * eta;
        let lam = lambda_tilde(r, t, eta, xi);
        let jet = chebyshev_jet(m - 1, theta(lam, r, a));
        let mf = m as f64;
        KernelTerms {
            i1: mf * (1.0 - 2.0 * xi) * w / lam,
            i2: (1.0 - 2.0 * xi) * dw,
            i3: -0.5 * (1.0 - xi) * w / (r + a - a * xi),
            i4: 0.5 * xi * w / (r - xi * a),
            i5: w * jet.d1 * dtheta_dt(r, t, eta, xi),
            t_val: jet.value,
            lambda: lam,
            eta,
        }
    }

    /// `eta (I1 + I2 + I3 + I4) T + I5`, i.e. `d/dt{K w T} / K`.
    pub fn dt_factor(&self) -> f64 {
        self.eta * (self.i1 + self.i2 + self.i3 + self.i4) * self.t_val + self.i5
    }

    /// `eta (I1 + I2 + I3 + I4) T` alone.
    pub fn transport_part(&self) -> f64 {
        self.eta * (self.i1 + self.i2 + self.i3 + self.i4) * self.t_val
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_endpoint_identity() {
        for &(r, t) in &[(3.0, 1.0), (1000.0, 999.0), (10.0, 0.5), (517.3, 211.9)] {
            assert!((theta(r - t, r, t) - 1.0).abs() <= 1e-13);
            assert!((theta(r + t, r, t) - 1.0).abs() <= 1e-13);
        }
    }

    #[test]
    fn n_forms_agree_and_vanish_at_ends() {
        let (r, t, eta, xi) = (2.0, 1.0, 0.5, 0.25);
        let e = n_expanded(r, t, eta, xi);
        let f = n_factored(r, t, eta, xi);
        let d = n_definition(r, t, eta, xi);
        // a = 0.5: -8*.25/64 + (3 + 4)/16 - (8 + 1)/4 ... evaluated by hand
        let hand = -8.0 * 0.25 * 0.015625 + (12.0 * 0.25 + 8.0) * 0.0625 - (8.0 + 1.0) * 0.25;
        assert!((e - hand).abs() < 1e-15);
        assert!((e - f).abs() < 1e-14);
        assert!((e - d).abs() < 1e-14);
        assert_eq!(n_factored(r, t, eta, 0.0), 0.0);
        assert_eq!(n_factored(r, t, eta, 1.0), 0.0);
    }

    #[test]
    fn dtheta_matches_finite_difference() {
        let (r, eta, xi) = (10.0, 0.7, 0.3);
        for t in [0.5, 1.0, 2.5] {
            let h = 1e-4;
            let fd = (kernel_theta(r, t + h, eta, xi) - kernel_theta(r, t - h, eta, xi)) / (2.0 * h);
            let an = dtheta_dt(r, t, eta, xi);
            assert!((fd - an).abs() < 1e-6 * an.abs(), "t={t}: {fd} vs {an}");
        }
    }

    #[test]
    fn dt_factor_matches_finite_difference() {
        let m = 3;
        let w = |y: f64| (1.0 + y).powf(-0.5);
        let dw = |y: f64| -0.5 * (1.0 + y).powf(-1.5);
        let (r, eta, xi) = (20.0, 0.8, 0.65);
        let prod = |t: f64| {
            let lam = lambda_tilde(r, t, eta, xi);
            kernel_k(m, r, t, eta, xi) * w(lam) * chebyshev_jet(m - 1, kernel_theta(r, t, eta, xi)).value
        };
        let t = 3.0;
        let h = 1e-5;
        let fd = (prod(t + h) - prod(t - h)) / (2.0 * h);
        let lam = lambda_tilde(r, t, eta, xi);
        let an = kernel_k(m, r, t, eta, xi) * KernelTerms::new(m, r, t, eta, xi, w(lam), dw(lam)).dt_factor();
        assert!((fd - an).abs() < 1e-7 * an.abs(), "{fd} vs {an}");
    }

    #[test]
    fn critical_points_solve_derivative() {
        let (r, a) = (10.0, 1.0);
        let (lo, hi) = n_critical_points(r, a);
        let dn = |x: f64| -24.0 * a * a * x * x + 4.0 * a * (6.0 * a + 4.0 * r) * x - 4.0 * a * (2.0 * r + a);
        assert!(dn(lo).abs() < 1e-10);
        assert!(dn(hi).abs() < 1e-9);
        assert!(lo > 0.0 && lo < 1.0 && hi > 1.0);
    }
}
