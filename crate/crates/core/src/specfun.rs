//! Legendre and Chebyshev polynomials, their endpoint derivatives, and the
//! constants that the lower-bound machinery is built from.
//!
//! Values and the first two derivatives come from three-term recurrences:
//!
//! ```text
//! (k+1) P_{k+1} = (2k+1) z P_k - k P_{k-1}       P'_{k+1}  = P'_{k-1}  + (2k+1) P_k
//!       T_{k+1} = 2 z T_k - T_{k-1}              T'_{k+1}  = 2 T_k  + 2 z T'_k  - T'_{k-1}
//!                                                T''_{k+1} = 4 T'_k + 2 z T''_k - T''_{k-1}
//! ```
//!
//! The derivative recurrences stay exact at `z = ±1`, where the usual
//! `(1 - z^2)` closed forms degenerate.

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 64;

const DOMAIN_SLACK: f64 = 1e-12;

/// Absolute resolution of the bisection on `eta_m` / `zeta_m`.
pub const SEARCH_TOL: f64 = 1e-6;
/// Factor applied to an interior bisection result.
pub const SAFETY_FACTOR: f64 = 0.999;
const SEARCH_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PolyKind {
    Legendre,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PolyFamily {
    pub kind: PolyKind,
    pub degree: usize,
}

impl PolyFamily {
    pub fn legendre(degree: usize) -> Self {
        PolyFamily {
            kind: PolyKind::Legendre,
            degree,
        }
    }

    pub fn chebyshev(degree: usize) -> Self {
        PolyFamily {
            kind: PolyKind::Chebyshev,
            degree,
        }
    }
}

/// Value, first and second derivative of a polynomial at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `P_k`, `P'_k`, `P''_k` at `z`. No domain or degree checks.
pub fn legendre_jet(k: usize, z: f64) -> PolyJet {
    // (p, dp, d2p) at degrees k-1 and k
    let (mut p0, mut dp0, mut ddp0) = (1.0, 0.0, 0.0);
    if k == 0 {
        return PolyJet {
            value: p0,
            d1: dp0,
            d2: ddp0,
        };
    }
    let (mut p1, mut dp1, mut ddp1) = (z, 1.0, 0.0);
    for j in 1..k {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * z * p1 - jf * p0) / (jf + 1.0);
        let dp2 = dp0 + (2.0 * jf + 1.0) * p1;
        let ddp2 = ddp0 + (2.0 * jf + 1.0) * dp1;
        p0 = p1;
        dp0 = dp1;
        ddp0 = ddp1;
        p1 = p2;
        dp1 = dp2;
        ddp1 = ddp2;
    }
    PolyJet {
        value: p1,
        d1: dp1,
        d2: ddp1,
    }
}

/// `T_k`, `T'_k`, `T''_k` at `z`. No domain or degree checks.
pub fn chebyshev_jet(k: usize, z: f64) -> PolyJet {
    let (mut t0, mut dt0, mut ddt0) = (1.0, 0.0, 0.0);
    if k == 0 {
        return PolyJet {
            value: t0,
            d1: dt0,
            d2: ddt0,
        };
    }
    let (mut t1, mut dt1, mut ddt1) = (z, 1.0, 0.0);
    for _ in 1..k {
        let t2 = 2.0 * z * t1 - t0;
        let dt2 = 2.0 * t1 + 2.0 * z * dt1 - dt0;
        let ddt2 = 4.0 * dt1 + 2.0 * z * ddt1 - ddt0;
        t0 = t1;
        dt0 = dt1;
        ddt0 = ddt1;
        t1 = t2;
        dt1 = dt2;
        ddt1 = ddt2;
    }
    PolyJet {
        value: t1,
        d1: dt1,
        d2: ddt1,
    }
}

pub fn poly_jet(family: PolyFamily, z: f64) -> PolyJet {
    match family.kind {
        PolyKind::Legendre => legendre_jet(family.degree, z),
        PolyKind::Chebyshev => chebyshev_jet(family.degree, z),
    }
}

/// Checked evaluation of `P_k`/`T_k` or one of its first two derivatives.
///
/// Arguments within `1e-12` of the interval are clamped onto `[-1, 1]`.
pub fn poly_eval(family: PolyFamily, z: f64, derivative_order: u8) -> Result<f64> {
    if family.degree > MAX_DEGREE {
        return Err(Error::Degree(family.degree));
    }
    if !(z.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(Error::Domain {
            value: z,
            domain: "[-1, 1]",
        });
    }
    let z = z.clamp(-1.0, 1.0);
    let jet = poly_jet(family, z);
    match derivative_order {
        0 => Ok(jet.value),
        1 => Ok(jet.d1),
        2 => Ok(jet.d2),
        _ => Err(Error::InvalidParameter(format!(
            "derivative order {derivative_order} not supported (0, 1 or 2)"
        ))),
    }
}

/// Closed-form derivatives of `P_{m-1}` and `T_{m-1}` at `z = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointDerivatives {
    pub p1: f64,
    pub p2: f64,
    pub t1: f64,
    pub t2: f64,
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("m must be >= 2, got {m}")));
    }
    if m > MAX_DEGREE {
        return Err(Error::Degree(m));
    }
    Ok(())
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// `P'_{m-1}(1) = m(m-1)/2`, `P''_{m-1}(1) = (m-1)(m-2)/4 * C(m+1, m-1)`,
/// `T'_{m-1}(1) = (m-1)^2`, `T''_{m-1}(1) = m(m-2)(m-1)^2/3`.
///
/// Each closed form is cross-checked against the recurrences at `z = 1`.
pub fn poly_endpoint_derivatives(m: usize) -> Result<EndpointDerivatives> {
    check_m(m)?;
    let mf = m as f64;
    let binom = (mf + 1.0) * mf / 2.0;
    let out = EndpointDerivatives {
        p1: 0.5 * mf * (mf - 1.0),
        p2: 0.25 * (mf - 1.0) * (mf - 2.0) * binom,
        t1: (mf - 1.0).powi(2),
        t2: mf * (mf - 2.0) * (mf - 1.0).powi(2) / 3.0,
    };
    let leg = legendre_jet(m - 1, 1.0);
    let che = chebyshev_jet(m - 1, 1.0);
    let checks = [
        (out.p1, leg.d1),
        (out.p2, leg.d2),
        (out.t1, che.d1),
        (out.t2, che.d2),
    ];
    for (closed, rec) in checks {
        if !rel_close(closed, rec, 1e-10) {
            return Err(Error::InvalidParameter(format!(
                "endpoint derivative mismatch for m = {m}: closed form {closed}, recurrence {rec}"
            )));
        }
    }
    Ok(out)
}

/// Worst (most negative) margin of the conditions defining `eta_m` at `z`:
/// `P_{m-1}(z) >= 1/2` and `0 < P'_{m-1}(z) <= m(m-1)/2`.
fn eta_margin(m: usize, z: f64) -> f64 {
    let jet = legendre_jet(m - 1, z);
    let cap = 0.5 * (m * (m - 1)) as f64;
    let upper = cap - jet.d1 + 1e-12 * cap;
    (jet.value - 0.5).min(jet.d1).min(upper)
}

/// Worst margin of `1/2 <= T_{m-1}(z) <= 1` and `0 < T'_{m-1}(z) <= (m-1)^2`.
fn zeta_margin(m: usize, z: f64) -> f64 {
    let jet = chebyshev_jet(m - 1, z);
    let cap = ((m - 1) * (m - 1)) as f64;
    let upper = cap - jet.d1 + 1e-12 * cap;
    (jet.value - 0.5)
        .min(1.0 + 1e-12 - jet.value)
        .min(jet.d1)
        .min(upper)
}

/// Minimum of `margin` over `[a, 1]`: dense uniform plus Chebyshev-clustered
/// sampling, followed by a golden-section refinement around the worst sample.
fn min_margin_on(a: f64, samples: usize, margin: &dyn Fn(f64) -> f64) -> f64 {
    let len = 1.0 - a;
    let mut best_z = 1.0;
    let mut best = margin(1.0);
    let mut visit = |z: f64| {
        let v = margin(z);
        if v < best {
            best = v;
            best_z = z;
        }
    };
    for i in 0..=samples {
        visit(a + len * i as f64 / samples as f64);
    }
    for i in 0..samples {
        let c = (std::f64::consts::PI * (i as f64 + 0.5) / samples as f64).cos();
        visit(a + 0.5 * len * (1.0 + c));
    }
    let h = len / samples as f64;
    let (mut lo, mut hi) = ((best_z - h).max(a), (best_z + h).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if margin(x1) < margin(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    best.min(margin(0.5 * (lo + hi)))
}

fn search_constant(m: usize, margin: &dyn Fn(f64) -> f64) -> Result<f64> {
    check_m(m)?;
    const SAMPLES: usize = 2048;
    let valid = |eta: f64| min_margin_on(1.0 / (1.0 + eta), SAMPLES, margin) >= 0.0;
    if valid(1.0) {
        return Ok(1.0);
    }
    if !valid(SEARCH_FLOOR) {
        return Err(Error::SearchFailure {
            m,
            floor: SEARCH_FLOOR,
        });
    }
    let (mut lo, mut hi) = (SEARCH_FLOOR, 1.0);
    while hi - lo > SEARCH_TOL {
        let mid = 0.5 * (lo + hi);
        if valid(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo * SAFETY_FACTOR)
}

/// Largest safe `eta in (0, 1]` with the Legendre conditions holding on
/// `[1/(1+eta), 1]`.
pub fn find_eta_m(m: usize) -> Result<f64> {
    search_constant(m, &|z| eta_margin(m, z))
}

/// Largest safe `zeta in (0, 1]` with the Chebyshev conditions holding on
/// `[1/(1+zeta), 1]`.
pub fn find_zeta_m(m: usize) -> Result<f64> {
    search_constant(m, &|z| zeta_margin(m, z))
}

/// Worst margin of the `eta_m` conditions over `samples` Chebyshev-spaced
/// points of `[1/(1+eta), 1]` (endpoints included).
pub fn eta_conditions_margin(m: usize, eta: f64, samples: usize) -> f64 {
    chebyshev_points(1.0 / (1.0 + eta), 1.0, samples)
        .map(|z| eta_margin(m, z))
        .fold(f64::INFINITY, f64::min)
}

pub fn zeta_conditions_margin(m: usize, zeta: f64, samples: usize) -> f64 {
    chebyshev_points(1.0 / (1.0 + zeta), 1.0, samples)
        .map(|z| zeta_margin(m, z))
        .fold(f64::INFINITY, f64::min)
}

/// Chebyshev–Lobatto points on `[a, b]`.
pub fn chebyshev_points(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| {
        let c = (std::f64::consts::PI * i as f64 / (n - 1) as f64).cos();
        0.5 * (a + b) + 0.5 * (b - a) * c
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaConstants {
    pub m: usize,
    pub eta_m: f64,
    pub zeta_m: f64,
    pub delta: f64,
    pub c1m: f64,
    pub c2m: f64,
    pub e_m: f64,
}

impl LemmaConstants {
    /// Builds the derived constants from given `eta_m`, `zeta_m`.
    pub fn from_parts(m: usize, eta_m: f64, zeta_m: f64) -> Self {
        let mf = m as f64;
        let kernel = 5.0 * zeta_m * (mf - 1.0).powi(2) / 3.0;
        LemmaConstants {
            m,
            eta_m,
            zeta_m,
            delta: (2.0 / eta_m).max(2.0 / zeta_m),
            c1m: mf * (mf - 1.0),
            c2m: mf - 3.0 / 8.0 + kernel,
            e_m: mf + 1.0 / 8.0 + kernel,
        }
    }
}

pub fn lemma_constants(m: usize) -> Result<LemmaConstants> {
    let eta = find_eta_m(m)?;
    let zeta = find_zeta_m(m)?;
    Ok(LemmaConstants::from_parts(m, eta, zeta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalExponents {
    pub p: f64,
    pub kappa0: f64,
}

impl CriticalExponents {
    pub fn new(p: f64) -> Result<Self> {
        Ok(CriticalExponents {
            p,
            kappa0: kappa0(p)?,
        })
    }
}

/// Critical decay rate `2/(p-1)`; it does not depend on the dimension.
pub fn kappa0(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be > 1, got {p}")));
    }
    Ok(2.0 / (p - 1.0))
}

/// Strauss exponent: positive root of `(n-1)p^2 - (n+1)p - 2 = 0`.
pub fn strauss_exponent(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok((nf + 1.0 + (nf * nf + 10.0 * nf - 7.0).sqrt()) / (2.0 * (nf - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact Rodrigues expansion of `P_k` as polynomial coefficients.
    fn rodrigues_legendre(k: usize) -> Vec<f64> {
        // (z^2 - 1)^k = sum_j C(k,j) (-1)^(k-j) z^(2j)
        let mut coeffs = vec![0i128; 2 * k + 1];
        let mut binom: i128 = 1;
        for j in 0..=k {
            let sign = if (k - j) % 2 == 0 { 1 } else { -1 };
            coeffs[2 * j] = sign * binom;
            binom = binom * (k - j) as i128 / (j + 1) as i128;
        }
        for _ in 0..k {
            coeffs = (1..coeffs.len())
                .map(|i| coeffs[i] * i as i128)
                .collect();
        }
        let denom = (1..=k).fold(1i128 << k, |acc, i| acc * i as i128);
        coeffs.iter().map(|&c| c as f64 / denom as f64).collect()
    }

    /// Exact expansion of the Chebyshev Rodrigues-type form
    /// `(-1)^k/(2k-1)!! (1-z^2)^(1/2) d^k/dz^k (1-z^2)^(k-1/2)`.
    fn rodrigues_chebyshev(k: usize) -> Vec<f64> {
        // d/dz [(1-z^2)^a P] = (1-z^2)^(a-1) [ -2a z P + (1 - z^2) P' ]
        let mut a = k as f64 - 0.5;
        let mut poly = vec![1.0f64];
        for _ in 0..k {
            let mut next = vec![0.0; poly.len() + 2];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] += -2.0 * a * c;
                if i > 0 {
                    next[i - 1] += c * i as f64;
                    next[i + 1] -= c * i as f64;
                }
            }
            poly = next;
            a -= 1.0;
        }
        let dfact: f64 = (1..=k).map(|i| (2 * i - 1) as f64).product();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        poly.iter().map(|c| sign * c / dfact).collect()
    }

    fn horner(coeffs: &[f64], z: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    #[test]
    fn rodrigues_oracles_match_recurrences() {
        for k in 0..=6 {
            let leg = rodrigues_legendre(k);
            let che = rodrigues_chebyshev(k);
            for i in 0..=40 {
                let z = -1.0 + 2.0 * i as f64 / 40.0;
                assert!((horner(&leg, z) - legendre_jet(k, z).value).abs() < 1e-13);
                assert!((horner(&che, z) - chebyshev_jet(k, z).value).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn spec_examples() {
        let p1 = poly_eval(PolyFamily::legendre(1), 0.5, 0).unwrap();
        assert_eq!(p1, 0.5);
        let t3 = poly_eval(PolyFamily::chebyshev(3), 1.0, 0).unwrap();
        assert_eq!(t3, 1.0);
        // Rodrigues: P_2 = (3z^2 - 1)/2
        let p2 = poly_eval(PolyFamily::legendre(2), 0.5, 0).unwrap();
        assert!((p2 - horner(&rodrigues_legendre(2), 0.5)).abs() < 1e-15);
        assert!((p2 + 0.125).abs() < 1e-15);
    }

    #[test]
    fn domain_and_degree_errors() {
        assert!(matches!(
            poly_eval(PolyFamily::legendre(3), 1.1, 0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            poly_eval(PolyFamily::chebyshev(65), 0.0, 0),
            Err(Error::Degree(65))
        ));
        // clamped just outside the interval
        assert_eq!(
            poly_eval(PolyFamily::chebyshev(5), 1.0 + 5e-13, 0).unwrap(),
            1.0
        );
        assert!(poly_eval(PolyFamily::legendre(2), 0.0, 3).is_err());
        assert!(poly_eval(PolyFamily::legendre(2), f64::NAN, 0).is_err());
    }

    #[test]
    fn endpoint_derivative_examples() {
        let d2 = poly_endpoint_derivatives(2).unwrap();
        assert_eq!(d2.p1, 1.0);
        assert_eq!(d2.t1, 1.0);
        assert_eq!(d2.t2, 0.0);
        let d3 = poly_endpoint_derivatives(3).unwrap();
        assert_eq!(d3.t2, 4.0);
        assert!(poly_endpoint_derivatives(1).is_err());
        assert!(poly_endpoint_derivatives(65).is_err());
    }

    #[test]
    fn endpoint_derivatives_match_one_sided_differences() {
        // Richardson-extrapolated backward differences at z = 1.
        for m in 2..=8 {
            let d = poly_endpoint_derivatives(m).unwrap();
            let fd = |h: f64| {
                let p = |z: f64| legendre_jet(m - 1, z).value;
                (p(1.0) - p(1.0 - h)) / h
            };
            let h = 1e-4;
            let extrap = 2.0 * fd(h / 2.0) - fd(h);
            assert!((extrap - d.p1).abs() < 1e-5 * d.p1.max(1.0), "m={m}");
            let fd_t = |h: f64| {
                let t = |z: f64| chebyshev_jet(m - 1, z).d1;
                (t(1.0) - t(1.0 - h)) / h
            };
            let extrap = 2.0 * fd_t(h / 2.0) - fd_t(h);
            assert!((extrap - d.t2).abs() < 1e-4 * d.t2.max(1.0), "m={m}");
        }
    }

    #[test]
    fn eta_and_zeta_examples() {
        assert_eq!(find_eta_m(2).unwrap(), 1.0);
        assert_eq!(find_zeta_m(2).unwrap(), 1.0);
        // P_2 >= 1/2 iff z >= sqrt(2/3): eta_3 <= sqrt(3/2) - 1.
        let eta3 = find_eta_m(3).unwrap();
        let bound = 1.5f64.sqrt() - 1.0;
        assert!(eta3 > 0.0 && eta3 <= bound);
        assert!(eta3 >= (bound - 2.0 * SEARCH_TOL) * SAFETY_FACTOR);
        // T_3(cos th) = cos 3th >= 1/2 iff th <= pi/9.
        let zeta4 = find_zeta_m(4).unwrap();
        let bound = 1.0 / (std::f64::consts::PI / 9.0).cos() - 1.0;
        assert!(zeta4 > 0.0 && zeta4 <= bound);
        assert!(zeta4 >= (bound - 2.0 * SEARCH_TOL) * SAFETY_FACTOR);
    }

    #[test]
    fn found_constants_satisfy_their_conditions() {
        for m in [2usize, 3, 4, 5, 8, 16, 33, 64] {
            let eta = find_eta_m(m).unwrap();
            let zeta = find_zeta_m(m).unwrap();
            assert!(eta > 0.0 && eta <= 1.0);
            assert!(zeta > 0.0 && zeta <= 1.0);
            assert!(1.0 / (1.0 + zeta) >= 0.5);
            assert!(eta_conditions_margin(m, eta, 10_000) >= 0.0, "m={m}");
            assert!(zeta_conditions_margin(m, zeta, 10_000) >= 0.0, "m={m}");
        }
    }

    #[test]
    fn lemma_constants_for_m2() {
        let c = lemma_constants(2).unwrap();
        assert_eq!(c.c1m, 2.0);
        assert_eq!(c.delta, 2.0);
        assert!((c.e_m - (2.0 + 0.125 + 5.0 / 3.0)).abs() < 1e-14);
        assert!((c.e_m - 3.791_666_666_666_667).abs() < 1e-12);
        assert!((c.e_m - c.c2m - 0.5).abs() < 1e-14);
    }

    #[test]
    fn critical_exponents() {
        assert_eq!(kappa0(3.0).unwrap(), 1.0);
        assert_eq!(kappa0(2.0).unwrap(), 2.0);
        assert!(kappa0(1.0).is_err());
        for n in 2..=12 {
            let p = strauss_exponent(n).unwrap();
            let nf = n as f64;
            assert!(((nf - 1.0) * p * p - (nf + 1.0) * p - 2.0).abs() < 1e-12);
            assert!(p > 1.0);
        }
        // p0(3) = 1 + sqrt(2)
        assert!((strauss_exponent(3).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_ode_residual() {
        for m in 2..=12 {
            let k = (m - 1) as f64;
            for i in 0..1000 {
                let z = -1.0 + 2.0 * i as f64 / 999.0;
                let j = chebyshev_jet(m - 1, z);
                let res = (1.0 - z * z) * j.d2 - z * j.d1 + k * k * j.value;
                assert!(res.abs() <= 1e-9, "m={m} z={z} res={res}");
            }
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn chebyshev_is_cos_of_multiple_angle(k in 0usize..=64, z in -1.0f64..=1.0) {
                let expect = (k as f64 * z.acos()).cos();
                prop_assert!((chebyshev_jet(k, z).value - expect).abs() <= 1e-10);
            }

            #[test]
            fn unit_endpoint(k in 0usize..=64) {
                prop_assert!((legendre_jet(k, 1.0).value - 1.0).abs() <= 1e-12);
                prop_assert!((chebyshev_jet(k, 1.0).value - 1.0).abs() <= 1e-12);
            }

            #[test]
            fn legendre_bounded_by_one(k in 0usize..=64, z in -1.0f64..=1.0) {
                prop_assert!(legendre_jet(k, z).value.abs() <= 1.0 + 1e-12);
            }
        }
    }
}
