//! Lower bounds for the free solution: `u0 >= RHS >= C t / (1+r+t)^{1+kappa}`.
//!
//! The right-hand sides are integrated on the same nodes as the free
//! solution itself, so both margins compare like with like.

use super::assumptions::{AssumptionKind, DataAssumptions};
use super::inequalities::sweep;
use super::region::{RegionGrid, RegionKind};
use crate::certificate::{Certificate, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::freewave::{
    even_moment, odd_moment, riemann_operator, u0_even_value, u0_low_value, u0_odd_value, LowDim,
};
use crate::profile::{RadialData, RadialProfile, SpatialData};
use crate::quadrature::QuadratureSpec;
use crate::specfun::lemma_constants;

fn seed(c: f64, kappa: f64, r: f64, t: f64) -> f64 {
    c * t * (1.0 + r + t).powf(-1.0 - kappa)
}

fn require(a: &DataAssumptions, allowed: &[AssumptionKind], grid: &RegionGrid, kind: RegionKind) -> Result<()> {
    if !allowed.contains(&a.which) {
        return Err(Error::InvalidParameter(format!(
            "assumption {} does not apply here",
            a.which.name()
        )));
    }
    if grid.region.kind != kind {
        return Err(Error::InvalidParameter(format!(
            "expected a {kind:?} grid, got {}",
            grid.region.describe()
        )));
    }
    Ok(())
}

/// Failed evaluations (points outside the evaluator's domain) count as
/// violations rather than aborting the sweep.
fn record_pair(c: &mut Certificate, r: f64, t: f64, u0: Result<f64>, rhs: f64, lower: f64) {
    match u0 {
        Ok(u) => {
            c.record(&[r, t, u, rhs, lower, 0.0], u - rhs);
            c.record(&[r, t, u, rhs, lower, 1.0], rhs - lower);
        }
        Err(_) => c.record(&[r, t, f64::NAN, rhs, lower, 0.0], f64::NAN),
    }
}

fn base(id: String, grid: &RegionGrid, a: &DataAssumptions, c: f64) -> Certificate {
    Certificate::new(
        id,
        grid.region.describe(),
        &["r", "t", "u0", "rhs", "lower", "check"],
        DEFAULT_TOLERANCE,
    )
    .with_constant("seed_constant", c)
    .with_constant("kappa", a.kappa)
}

/// Odd `n = 2m+1`:
/// `RHS = (1/2r^m){f(r+t)(r+t)^m + f(r-t)(r-t)^m}
///      + (1/4r^m) int lambda^m (-C_{1,m} f/lambda + g)`.
pub fn verify_lower_bound_odd(
    profile: &RadialProfile,
    a: &DataAssumptions,
    m: usize,
    grid: &RegionGrid,
    q: &QuadratureSpec,
) -> Result<Certificate> {
    require(a, &[AssumptionKind::Odd1, AssumptionKind::Odd2], grid, RegionKind::Sigma1)?;
    let c1m = lemma_constants(m)?.c1m;
    let c4 = a.seed_constant(m);
    let mi = m as i32;
    let cert = base(format!("lower-bound-odd(m={m})"), grid, a, c4).with_constant("C1m", c1m);
    Ok(sweep(cert, grid, |p, c| {
        let (r, t) = (p.r, p.t);
        let boundary = 0.5
            * (profile.f(r + t) * ((r + t) / r).powi(mi) + profile.f(r - t) * ((r - t) / r).powi(mi));
        let rhs = boundary
            + 0.5 * odd_moment(m, r, t, q, |l| -c1m * profile.f(l) / l + profile.g(l));
        let u0 = u0_odd_value(profile, m, r, t, q);
        record_pair(c, r, t, u0, rhs, seed(c4, a.kappa, r, t));
    }))
}

/// Even `n = 2m`: `RHS = (1/(pi r^{m-1})) int int {-2 C_{2,m} f/lambda
/// - 2|f'| + g} lambda^m ...`, which is `even_moment` of that integrand.
pub fn verify_lower_bound_even(
    profile: &RadialProfile,
    a: &DataAssumptions,
    m: usize,
    grid: &RegionGrid,
    q: &QuadratureSpec,
) -> Result<Certificate> {
    require(a, &[AssumptionKind::Even], grid, RegionKind::Sigma1)?;
    let c2m = lemma_constants(m)?.c2m;
    let c = a.seed_constant(m);
    let cert = base(format!("lower-bound-even(m={m})"), grid, a, c).with_constant("C2m", c2m);
    Ok(sweep(cert, grid, |p, cc| {
        let (r, t) = (p.r, p.t);
        let rhs = even_moment(m, r, t, q, |l| {
            -2.0 * c2m * profile.f(l) / l - 2.0 * profile.df(l).abs() + profile.g(l)
        });
        let u0 = u0_even_value(profile, m, r, t, q);
        record_pair(cc, r, t, u0, rhs, seed(c, a.kappa, r, t));
    }))
}

/// `n = 2, 3` with radial data placed at `x = (r, 0, 0)`:
/// `RHS = R(f/(1+|y|) - |grad f| + g | x, t)`. The seed constant equals `C0`
/// because the surface (or disc) average of the weight is exactly 1.
pub fn verify_lower_bound_low(
    profile: &RadialProfile,
    a: &DataAssumptions,
    n: usize,
    grid: &RegionGrid,
    q: &QuadratureSpec,
) -> Result<Certificate> {
    require(a, &[AssumptionKind::Low], grid, RegionKind::Sigma2)?;
    let dim = LowDim::from_n(n)?;
    let c5 = a.seed_constant(0);
    let data = RadialData(profile.clone());
    let cert = base(format!("lower-bound-low(n={n})"), grid, a, c5)
        .with_constant("average_factor", 1.0);
    Ok(sweep(cert, grid, |p, c| {
        let (r, t) = (p.r, p.t);
        let x = [r, 0.0, 0.0];
        let rhs = riemann_operator(dim, x, t, q, |y| {
            let g = data.grad_f(y);
            let grad = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
            data.f(y) / (1.0 + crate::profile::norm(y)) - grad + data.g(y)
        });
        let u0 = Ok(u0_low_value(&data, dim, x, t, q));
        record_pair(c, r, t, u0, rhs, seed(c5, a.kappa, r, t));
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::assumptions::family;
    use crate::bounds::region::Region;
    use crate::profile::families;

    fn q() -> QuadratureSpec {
        QuadratureSpec::new(64, 32, 32)
    }

    fn sigma1(m: usize, n: usize) -> Region {
        Region::sigma1(n, 1.0, lemma_constants(m).unwrap().delta).unwrap()
    }

    #[test]
    fn odd_families_certify() {
        for which in [AssumptionKind::Odd1, AssumptionKind::Odd2] {
            for m in [2, 3] {
                let (p, a) = family(which, m, 2.0, 0.5, 1.0).unwrap();
                let g = RegionGrid::random(sigma1(m, 2 * m + 1), 60, 1);
                let c = verify_lower_bound_odd(&p, &a, m, &g, &q()).unwrap();
                assert!(c.certified(), "{which:?} m={m}: {}", c.summary());
                assert!(c.worst_margin > 0.0);
            }
        }
    }

    #[test]
    fn even_family_certifies_and_flipped_fails() {
        let (p, a) = family(AssumptionKind::Even, 2, 2.0, 0.5, 1.0).unwrap();
        let g = RegionGrid::random(sigma1(2, 4), 40, 2);
        let c = verify_lower_bound_even(&p, &a, 2, &g, &q()).unwrap();
        assert!(c.certified(), "{}", c.summary());
        let bad = verify_lower_bound_even(&p.negated_g(), &a, 2, &g, &q()).unwrap();
        assert!(!bad.certified());
    }

    #[test]
    fn low_family_certifies() {
        let (p, a) = family(AssumptionKind::Low, 2, 2.0, 0.5, 1.0).unwrap();
        for n in [2, 3] {
            let g = RegionGrid::random(Region::sigma2(n, 1.0).unwrap(), 30, 3);
            let c = verify_lower_bound_low(&p, &a, n, &g, &q()).unwrap();
            assert!(c.certified(), "n={n}: {}", c.summary());
        }
    }

    #[test]
    fn zero_data_gives_zero_margins() {
        let (_, a) = family(AssumptionKind::Odd2, 2, 2.0, 0.5, 1.0).unwrap();
        let g = RegionGrid::from_points(sigma1(2, 5), &[(30.0, 5.0)]);
        let c = verify_lower_bound_odd(&families::zero(), &a, 2, &g, &q()).unwrap();
        assert_eq!(c.violations[0].point[2], 0.0);
        assert_eq!(c.violations[0].point[3], 0.0);
        // u0 = RHS = 0 passes, RHS >= seed fails
        assert_eq!(c.violation_count, 1);
    }

    #[test]
    fn wrong_assumption_is_rejected() {
        let (p, a) = family(AssumptionKind::Even, 2, 2.0, 0.5, 1.0).unwrap();
        let g = RegionGrid::random(sigma1(2, 5), 4, 1);
        assert!(verify_lower_bound_odd(&p, &a, 2, &g, &q()).is_err());
    }
}
