use serde::Serialize;

use crate::certificate::{Certificate, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::profile::{families, RadialProfile};
use crate::specfun::{kappa0, lemma_constants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AssumptionKind {
    Low,
    Odd1,
    Odd2,
    Even,
}

impl AssumptionKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "low" => Ok(AssumptionKind::Low),
            "odd1" => Ok(AssumptionKind::Odd1),
            "odd2" => Ok(AssumptionKind::Odd2),
            "even" => Ok(AssumptionKind::Even),
            _ => Err(Error::InvalidParameter(format!(
                "unknown assumption '{s}' (low, odd1, odd2, even)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AssumptionKind::Low => "low",
            AssumptionKind::Odd1 => "odd1",
            AssumptionKind::Odd2 => "odd2",
            AssumptionKind::Even => "even",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DataAssumptions {
    pub p: f64,
    pub a: f64,
    pub kappa: f64,
    pub r_big: f64,
    pub which: AssumptionKind,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
}

impl DataAssumptions {
    /// Checks `p > 1`, `A > 0`, `R > 0` and `0 < kappa < 2/(p-1)`, and that
    /// the constant the chosen assumption needs is present and positive.
    pub fn new(
        p: f64,
        a: f64,
        kappa: f64,
        r_big: f64,
        which: AssumptionKind,
        c: [Option<f64>; 4],
    ) -> Result<Self> {
        let k0 = kappa0(p)?;
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!("A must be > 0, got {a}")));
        }
        if !(r_big > 0.0) {
            return Err(Error::InvalidParameter(format!("R must be > 0, got {r_big}")));
        }
        if !(kappa > 0.0 && kappa < k0) {
            return Err(Error::InvalidParameter(format!(
                "kappa must lie in (0, kappa0) = (0, {k0}), got {kappa}"
            )));
        }
        let needed = match which {
            AssumptionKind::Low => 0,
            AssumptionKind::Odd1 => 1,
            AssumptionKind::Odd2 => 2,
            AssumptionKind::Even => 3,
        };
        match c[needed] {
            Some(v) if v > 0.0 => {}
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "assumption {} needs C{needed} > 0",
                    which.name()
                )))
            }
        }
        Ok(DataAssumptions {
            p,
            a,
            kappa,
            r_big,
            which,
            c0: c[0],
            c1: c[1],
            c2: c[2],
            c3: c[3],
        })
    }

    fn constant(&self, i: usize) -> f64 {
        [self.c0, self.c1, self.c2, self.c3][i].unwrap_or(0.0)
    }

    /// Seed constant of the lower bound `C t / (1+r+t)^{1+kappa}`.
    pub fn seed_constant(&self, m: usize) -> f64 {
        match self.which {
            AssumptionKind::Low => self.constant(0),
            AssumptionKind::Odd1 => 0.5 * self.constant(1) * (1.0 + (2.0f64 / 3.0).powi(m as i32)),
            AssumptionKind::Odd2 => self.constant(2) / 4.0,
            AssumptionKind::Even => self.constant(3) / (std::f64::consts::PI * 2f64.sqrt()),
        }
    }
}

/// Built-in family `f = C1 (1+r)^{-kappa}`, `g = G (1+r)^{-1-kappa}` with `G`
/// chosen so the selected assumption holds for every `r >= R`.
///
/// `(1+r)/r` is decreasing, so its supremum over `r >= R` is `(1+R)/R`; the
/// resulting `G` is inflated by 1% to keep a strict margin.
pub fn family(
    which: AssumptionKind,
    m: usize,
    p: f64,
    kappa: f64,
    r_big: f64,
) -> Result<(RadialProfile, DataAssumptions)> {
    let c1 = 1.0;
    let c_target = 1.0;
    let sup = (1.0 + r_big) / r_big;
    let (g, consts) = match which {
        AssumptionKind::Low => (c_target + kappa * c1, [Some(c_target), Some(c1), None, None]),
        AssumptionKind::Odd1 => {
            let c1m = lemma_constants(m)?.c1m;
            (1.01 * c1m * c1 * sup, [None, Some(c1), None, None])
        }
        AssumptionKind::Odd2 => {
            let c1m = lemma_constants(m)?.c1m;
            (
                1.01 * (c_target + c1m * c1 * sup),
                [None, Some(c1), Some(c_target), None],
            )
        }
        AssumptionKind::Even => {
            let c2m = lemma_constants(m)?.c2m;
            (
                2.02 * (c_target + c2m * c1 * sup + kappa * c1),
                [None, Some(c1), None, Some(c_target)],
            )
        }
    };
    let a = DataAssumptions::new(p, 1.0, kappa, r_big, which, consts)?;
    let profile = families::power_decay(c1, g, kappa).with_param("R", r_big);
    Ok((profile, a))
}

/// Strict conditions (`> 0`) fail at exactly zero.
fn strict(v: f64, tol: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        v - 2.0 * tol
    }
}

/// Samples the selected assumption's pointwise conditions at `n_samples`
/// log-spaced radii in `[R, r_max]`. The `check` coordinate numbers the
/// conditions in the order they are listed for each assumption.
pub fn check_assumption(
    profile: &RadialProfile,
    a: &DataAssumptions,
    m: usize,
    r_max: f64,
    n_samples: usize,
) -> Result<Certificate> {
    if !(r_max > a.r_big) || n_samples < 100 {
        return Err(Error::InvalidParameter(format!(
            "need r_max > R and at least 100 samples (r_max = {r_max}, samples = {n_samples})"
        )));
    }
    let tol = DEFAULT_TOLERANCE;
    let decay = |r: f64, c: f64| c * (1.0 + r).powf(-1.0 - a.kappa);
    let consts = match a.which {
        AssumptionKind::Low => None,
        _ => Some(lemma_constants(m)?),
    };
    let mut cert = Certificate::new(
        format!("assumption-{}", a.which.name()),
        format!("[{}, {}]", a.r_big, r_max),
        &["r", "check"],
        tol,
    )
    .with_constant("kappa", a.kappa)
    .with_constant("R", a.r_big);
    for i in 0..n_samples {
        let r = a.r_big * (r_max / a.r_big).powf(i as f64 / (n_samples - 1) as f64);
        let (f, g, df) = (profile.f(r), profile.g(r), profile.df(r));
        let margins: Vec<f64> = match a.which {
            AssumptionKind::Low => vec![
                strict(f, tol),
                f / (1.0 + r) - df.abs() + g - decay(r, a.constant(0)),
            ],
            AssumptionKind::Odd1 => {
                let c1m = consts.expect("high-dimensional constants").c1m;
                vec![
                    f - a.constant(1) * (1.0 + r).powf(-a.kappa),
                    strict(g, tol),
                    strict(-c1m * f / r + g, tol),
                ]
            }
            AssumptionKind::Odd2 => {
                let c1m = consts.expect("high-dimensional constants").c1m;
                vec![
                    strict(f, tol),
                    strict(g, tol),
                    -c1m * f / r + g - decay(r, a.constant(2)),
                ]
            }
            AssumptionKind::Even => {
                let c2m = consts.expect("high-dimensional constants").c2m;
                vec![
                    strict(f, tol),
                    strict(g, tol),
                    -c2m * f / r - df.abs() + 0.5 * g - decay(r, a.constant(3)),
                ]
            }
        };
        for (k, margin) in margins.into_iter().enumerate() {
            cert.record(&[r, k as f64], margin);
        }
    }
    if let Some(c) = consts {
        cert = cert.with_constant("C1m", c.c1m).with_constant("C2m", c.c2m);
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_in_families_satisfy_their_assumptions() {
        for which in [
            AssumptionKind::Low,
            AssumptionKind::Odd1,
            AssumptionKind::Odd2,
            AssumptionKind::Even,
        ] {
            for m in [2, 3, 4] {
                let (p, a) = family(which, m, 2.0, 0.5, 1.0).unwrap();
                let c = check_assumption(&p, &a, m, 1e4, 2000).unwrap();
                assert!(c.certified(), "{which:?} m={m}: {}", c.summary());
            }
        }
    }

    #[test]
    fn zero_position_fails_even() {
        let (_, a) = family(AssumptionKind::Even, 2, 2.0, 0.5, 1.0).unwrap();
        let p = families::power_decay(0.0, 50.0, 0.5);
        let c = check_assumption(&p, &a, 2, 100.0, 200).unwrap();
        assert!(!c.certified());
        assert_eq!(c.violations[0].point[1], 0.0);
    }

    #[test]
    fn kappa_gate() {
        let err = family(AssumptionKind::Odd2, 2, 3.0, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
        assert!(DataAssumptions::new(2.0, 1.0, 0.5, 1.0, AssumptionKind::Odd2, [None; 4]).is_err());
    }

    #[test]
    fn flipped_velocity_is_caught() {
        let (p, a) = family(AssumptionKind::Odd2, 3, 2.0, 0.5, 1.0).unwrap();
        let c = check_assumption(&p.negated_g(), &a, 3, 100.0, 200).unwrap();
        assert!(!c.certified());
    }
}
