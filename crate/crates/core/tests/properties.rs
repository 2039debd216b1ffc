use proptest::prelude::*;
use wavebound::bounds::{family, verify_lower_bound_odd, AssumptionKind, Region, RegionGrid};
use wavebound::freewave::{refine_until, u0_even_value, u0_low_value, u0_odd_value, LowDim};
use wavebound::profile::{families, RadialData};
use wavebound::quadrature::QuadratureSpec;
use wavebound::specfun::lemma_constants;

fn q() -> QuadratureSpec {
    QuadratureSpec::new(128, 64, 64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn free_solution_is_linear_in_the_data(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        r in 5.0f64..40.0,
        frac in 0.05f64..0.9,
    ) {
        let p1 = families::gaussian(1.0, 0.2, 12.0, 3.0);
        let p2 = families::power_decay(1.0, 2.0, 0.5);
        let mix = p1.combine(a, &p2, b);
        let t = frac * r;
        for m in [2, 3] {
            let odd = u0_odd_value(&mix, m, r, t, &q()).unwrap();
            let odd_parts = a * u0_odd_value(&p1, m, r, t, &q()).unwrap()
                + b * u0_odd_value(&p2, m, r, t, &q()).unwrap();
            prop_assert!((odd - odd_parts).abs() <= 1e-11 * (1.0 + odd.abs()));
            let even = u0_even_value(&mix, m, r, t, &q()).unwrap();
            let even_parts = a * u0_even_value(&p1, m, r, t, &q()).unwrap()
                + b * u0_even_value(&p2, m, r, t, &q()).unwrap();
            prop_assert!((even - even_parts).abs() <= 1e-11 * (1.0 + even.abs()));
        }
        let x = [r, 0.0, 0.0];
        let low = u0_low_value(&RadialData(mix), LowDim::Three, x, t, &q());
        let low_parts = a * u0_low_value(&RadialData(p1), LowDim::Three, x, t, &q())
            + b * u0_low_value(&RadialData(p2), LowDim::Three, x, t, &q());
        prop_assert!((low - low_parts).abs() <= 1e-11 * (1.0 + low.abs()));
    }
}

/// `u_tt - u_rr - (n-1)/r u_r` by central differences; `O(h^2)` relative to
/// the size of the individual terms.
fn radial_residual(u: impl Fn(f64, f64) -> f64, n: usize, r: f64, t: f64, h: f64) -> (f64, f64) {
    let c = u(r, t);
    let utt = (u(r, t + h) - 2.0 * c + u(r, t - h)) / (h * h);
    let urr = (u(r + h, t) - 2.0 * c + u(r - h, t)) / (h * h);
    let ur = (u(r + h, t) - u(r - h, t)) / (2.0 * h);
    let drift = (n as f64 - 1.0) / r * ur;
    (utt - urr - drift, utt.abs() + urr.abs() + drift.abs())
}

#[test]
fn representations_solve_the_radial_wave_equation() {
    let p = families::gaussian(1.0, 0.5, 12.0, 2.0);
    let qq = QuadratureSpec::new(256, 128, 128);
    for &(r, t) in &[(14.0, 3.0), (20.0, 7.0), (9.0, 2.5)] {
        for m in [2, 3] {
            let (res, scale) =
                radial_residual(|r, t| u0_odd_value(&p, m, r, t, &qq).unwrap(), 2 * m + 1, r, t, 1e-2);
            assert!(res.abs() <= 1e-3 * scale, "odd m={m} ({r},{t}): {res} vs {scale}");
            let (res, scale) =
                radial_residual(|r, t| u0_even_value(&p, m, r, t, &qq).unwrap(), 2 * m, r, t, 1e-2);
            assert!(res.abs() <= 1e-3 * scale, "even m={m} ({r},{t}): {res} vs {scale}");
        }
        let low = |r: f64, t: f64| u0_low_value(&RadialData(p.clone()), LowDim::Two, [r, 0.0, 0.0], t, &qq);
        let (res, scale) = radial_residual(low, 2, r, t, 1e-2);
        assert!(res.abs() <= 1e-3 * scale, "n=2 ({r},{t}): {res} vs {scale}");
    }
}

#[test]
fn quadrature_refinement_converges() {
    let p = families::power_decay(1.0, 3.0, 0.5);
    let start = QuadratureSpec::new(16, 8, 8);
    let odd = refine_until(&start, 1e-10, |q| u0_odd_value(&p, 3, 50.0, 10.0, q)).unwrap();
    assert!(odd.converged && odd.achieved_rel_tol <= 1e-10);
    let even = refine_until(&start, 1e-8, |q| u0_even_value(&p, 3, 50.0, 10.0, q)).unwrap();
    assert!(even.converged);
}

#[test]
fn lower_bound_certificate_is_stable_under_grid_refinement() {
    let (p, a) = family(AssumptionKind::Odd2, 2, 2.0, 0.5, 1.0).unwrap();
    let region = Region::sigma1(5, 1.0, lemma_constants(2).unwrap().delta).unwrap();
    let mut margins = Vec::new();
    for size in [8, 16, 32] {
        let grid = RegionGrid::with_size(region, size).unwrap();
        let c = verify_lower_bound_odd(&p, &a, 2, &grid, &q()).unwrap();
        assert!(c.certified(), "{size}: {}", c.summary());
        margins.push(c.worst_margin);
    }
    assert!(margins.iter().all(|&m| m > 0.0), "{margins:?}");
}
