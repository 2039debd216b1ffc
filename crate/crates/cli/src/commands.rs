use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde_json::json;
use wavebound::blowup::{kappa_sweep, run_iteration, sweep_csv, IterationConfig, Verdict};
use wavebound::bounds::{
    check_assumption, family, verify_dtheta_bounds, verify_kernel_inequality,
    verify_lower_bound_even, verify_lower_bound_low, verify_lower_bound_odd, verify_n_factorization,
    verify_theta_bound, AssumptionKind, DataAssumptions, Region, RegionGrid,
};
use wavebound::certificate::Certificate;
use wavebound::fdm::{compare_with_representation, solve, FdmConfig, FdmStatus, Nonlinearity};
use wavebound::freewave::{u0_even, u0_low, u0_odd, LowDim};
use wavebound::profile::{families, RadialData, RadialProfile};
use wavebound::quadrature::QuadratureSpec;
use wavebound::specfun::{kappa0, lemma_constants, strauss_exponent};

use crate::config::RunConfig;

pub type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Violated,
}

/// Temp file in the target directory, then rename over the destination.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)?;
    Ok(())
}

fn emit(cfg: &RunConfig, name: &str, contents: &str) -> CliResult<()> {
    let path = cfg.out.join(name);
    write_atomic(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn quadrature(cfg: &RunConfig) -> QuadratureSpec {
    QuadratureSpec::new(cfg.nodes, cfg.nodes / 2, cfg.nodes / 2)
}

/// Data profile named by `family`, with assumption constants when the
/// family is the built-in assumption family `power`.
pub fn data(cfg: &RunConfig) -> CliResult<(RadialProfile, Option<DataAssumptions>)> {
    let (profile, assumptions) = match cfg.family.as_str() {
        "power" => {
            let (p, a) = family(cfg.assumption, cfg.m, cfg.p, cfg.kappa, cfg.r_big)?;
            (p, Some(a))
        }
        "gaussian" => (
            families::gaussian(
                cfg.param("a", 1.0),
                cfg.param("b", 0.0),
                cfg.param("center", 10.0),
                cfg.param("width", 2.0),
            ),
            None,
        ),
        "constant" => (families::constant(cfg.param("c", 1.0)), None),
        "velocity" => (families::velocity_power(cfg.param("b", 1.0)), None),
        "zero" => (families::zero(), None),
        other => {
            return Err(format!(
                "unknown family {other:?} (power, gaussian, constant, velocity, zero)"
            )
            .into())
        }
    };
    let profile = match cfg.negate.as_str() {
        "f" => profile.negated().negated_g(),
        "g" => profile.negated_g(),
        "both" => profile.negated(),
        _ => profile,
    };
    Ok((profile, assumptions))
}

fn exterior_region(cfg: &RunConfig) -> CliResult<Region> {
    Ok(if cfg.n <= 3 {
        Region::sigma2(cfg.n, cfg.r_big)?
    } else {
        Region::sigma1(cfg.n, cfg.r_big, lemma_constants(cfg.m)?.delta)?
    })
}

fn require_matching_m(cfg: &RunConfig) -> CliResult<()> {
    if cfg.n >= 4 && cfg.m != cfg.n / 2 {
        return Err(format!("m = {} does not match n = {}", cfg.m, cfg.n).into());
    }
    Ok(())
}

pub fn constants(cfg: &RunConfig) -> CliResult<Outcome> {
    let k0 = kappa0(cfg.p)?;
    let p0 = strauss_exponent(cfg.n)?;
    let mut csv = String::from("m,eta_m,zeta_m,delta,C1m,C2m,Em,kappa0,p0\n");
    for m in cfg.m_lo..=cfg.m_hi {
        let c = lemma_constants(m)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            m, c.eta_m, c.zeta_m, c.delta, c.c1m, c.c2m, c.e_m, k0, p0
        );
    }
    println!("p = {}: kappa0 = {k0}; n = {}: p0 = {p0}", cfg.p, cfg.n);
    emit(cfg, "constants.csv", &csv)?;
    Ok(Outcome::Ok)
}

pub fn free(cfg: &RunConfig) -> CliResult<Outcome> {
    require_matching_m(cfg)?;
    let (profile, _) = data(cfg)?;
    let grid = RegionGrid::with_size(exterior_region(cfg)?, cfg.grid)?;
    let q = quadrature(cfg);
    let data = RadialData(profile.clone());
    let rows: Vec<(f64, f64, f64, f64)> = grid
        .points
        .par_iter()
        .map(|p| {
            let ev = if cfg.n <= 3 {
                u0_low(&data, LowDim::from_n(cfg.n)?, [p.r, 0.0, 0.0], p.t, &q)?
            } else if cfg.n % 2 == 1 {
                u0_odd(&profile, cfg.m, p.r, p.t, &q)?
            } else {
                u0_even(&profile, cfg.m, p.r, p.t, &q)?
            };
            Ok((p.r, p.t, ev.value, ev.quad_tol))
        })
        .collect::<wavebound::Result<_>>()?;
    let mut csv = String::from("r,t,u0,quad_tol\n");
    for (r, t, u, tol) in &rows {
        let _ = writeln!(csv, "{r},{t},{u},{tol}");
    }
    let worst = rows.iter().map(|x| x.3).fold(0.0, f64::max);
    println!("{} points, worst quad_tol {worst:e}", rows.len());
    emit(cfg, "free.csv", &csv)?;
    Ok(Outcome::Ok)
}

fn report(cfg: &RunConfig, stem: &str, cert: Certificate) -> CliResult<Outcome> {
    let cert = cert.with_tolerance(cfg.tol);
    println!("{}", cert.summary());
    emit(cfg, &format!("{stem}.json"), &cert.to_json())?;
    emit(cfg, &format!("{stem}-violations.csv"), &cert.violations_csv())?;
    Ok(if cert.certified() {
        Outcome::Ok
    } else {
        Outcome::Violated
    })
}

fn assumptions_of(cfg: &RunConfig, a: Option<DataAssumptions>) -> CliResult<DataAssumptions> {
    a.ok_or_else(|| {
        format!(
            "family {:?} carries no assumption constants; use family = power",
            cfg.family
        )
        .into()
    })
}

pub fn verify(cfg: &RunConfig, which: &str) -> CliResult<Outcome> {
    let q = quadrature(cfg);
    let sigma1 = || -> CliResult<RegionGrid> {
        let region = Region::sigma1(cfg.n, cfg.r_big, lemma_constants(cfg.m)?.delta)?;
        Ok(RegionGrid::with_size(region, cfg.grid)?)
    };
    let cert = match which {
        "assumption" => {
            let (profile, a) = data(cfg)?;
            let a = assumptions_of(cfg, a)?;
            let r_max = (1000.0 * cfg.r_big).max(1000.0);
            let samples = (cfg.grid * cfg.grid).max(100);
            check_assumption(&profile, &a, cfg.m, r_max, samples)?
        }
        "theta" => verify_theta_bound(cfg.m, &sigma1()?, cfg.samples)?,
        "nfact" => verify_n_factorization((cfg.grid * cfg.grid).max(1000), cfg.seed)?,
        "dtheta" => verify_dtheta_bounds(cfg.m, &sigma1()?, cfg.samples)?,
        "kernel" => {
            let (profile, _) = data(cfg)?;
            verify_kernel_inequality(cfg.m, &profile, &sigma1()?, cfg.samples)?
        }
        "lower-odd" | "lower-even" => {
            let odd = which == "lower-odd";
            if cfg.n < 4 || (cfg.n % 2 == 1) != odd {
                return Err(format!("{which} needs an {} n >= 4, got n = {}", if odd { "odd" } else { "even" }, cfg.n).into());
            }
            require_matching_m(cfg)?;
            let (profile, a) = data(cfg)?;
            let a = assumptions_of(cfg, a)?;
            if odd {
                verify_lower_bound_odd(&profile, &a, cfg.m, &sigma1()?, &q)?
            } else {
                verify_lower_bound_even(&profile, &a, cfg.m, &sigma1()?, &q)?
            }
        }
        "lower-low" => {
            if cfg.assumption != AssumptionKind::Low {
                return Err("lower-low needs assumption = low".into());
            }
            let (profile, a) = data(cfg)?;
            let a = assumptions_of(cfg, a)?;
            let grid = RegionGrid::with_size(Region::sigma2(cfg.n, cfg.r_big)?, cfg.grid)?;
            verify_lower_bound_low(&profile, &a, cfg.n, &grid, &q)?
        }
        other => return Err(format!("unknown inequality {other:?}").into()),
    };
    report(cfg, &format!("verify-{which}"), cert)
}

fn iteration_config(cfg: &RunConfig) -> IterationConfig {
    let mut it = IterationConfig::new(cfg.n, cfg.p, cfg.a, cfg.kappa, (cfg.apex_r, cfg.apex_t));
    it.max_iters = cfg.max_iters;
    it.threshold = cfg.threshold;
    it.levels = cfg.levels;
    it.r_big = cfg.r_big;
    it.seed_constant = cfg.params.get("seed_constant").copied();
    it
}

fn describe(v: &Verdict) -> String {
    match v {
        Verdict::Diverged { k, value } => format!("diverged at iteration {k} (apex value {value:e})"),
        Verdict::BoundedAtHorizon { max_value } => format!("bounded at horizon (max {max_value:e})"),
    }
}

pub fn iterate(cfg: &RunConfig) -> CliResult<Outcome> {
    let rep = run_iteration(&iteration_config(cfg))?;
    println!(
        "n = {}, p = {}, kappa = {} (kappa0 = {}): {}",
        rep.n,
        rep.p,
        rep.kappa,
        rep.kappa0,
        describe(&rep.verdict)
    );
    let mut csv = String::from("iter,apex_value\n");
    for (k, v) in rep.history.iter().enumerate() {
        let _ = writeln!(csv, "{k},{v}");
    }
    emit(cfg, "iterate.csv", &csv)?;
    emit(cfg, "iterate.json", &rep.to_json())?;
    Ok(Outcome::Ok)
}

pub fn sweep(cfg: &RunConfig) -> CliResult<Outcome> {
    let reports = kappa_sweep(&iteration_config(cfg), &cfg.kappas)?;
    let mut summary = String::from("kappa,kappa0,diverged,iterations,growth_ratio\n");
    for rep in &reports {
        println!("kappa = {}: {}", rep.kappa, describe(&rep.verdict));
        let _ = writeln!(
            summary,
            "{},{},{},{},{}",
            rep.kappa,
            rep.kappa0,
            rep.diverged(),
            rep.history.len() - 1,
            rep.growth_ratio()
        );
    }
    emit(cfg, "sweep.csv", &sweep_csv(&reports))?;
    emit(cfg, "sweep-summary.csv", &summary)?;
    Ok(Outcome::Ok)
}

pub fn fdm(cfg: &RunConfig) -> CliResult<Outcome> {
    let (profile, _) = data(cfg)?;
    let mut fc = FdmConfig::new(cfg.n, cfg.r_max, cfg.dr, cfg.t_end);
    fc.cfl = cfg.cfl;
    if cfg.a != 0.0 {
        fc.nonlinearity = Nonlinearity::power(cfg.a, cfg.p)?;
    }
    let sol = solve(&profile, &fc)?;
    let status = match sol.status {
        FdmStatus::Completed => "completed".to_string(),
        FdmStatus::CutoffHit(t) => format!("cutoff hit at t = {t}"),
    };
    println!("{} steps of dt = {}: {status}", sol.steps, sol.dt);
    let summary = json!({
        "n": sol.n,
        "dr": sol.dr,
        "dt": sol.dt,
        "steps": sol.steps,
        "status": status,
        "trusted_radius": fc.trusted_radius(),
        "energy_drift": if fc.nonlinearity.is_zero() { Some(sol.energy_drift()) } else { None },
    });
    emit(cfg, "fdm.csv", &sol.snapshots_csv())?;
    emit(cfg, "fdm.json", &serde_json::to_string_pretty(&summary)?)?;
    Ok(Outcome::Ok)
}

/// Linear solver against the representation formula at random exterior
/// points; `a` is ignored.
pub fn compare(cfg: &RunConfig) -> CliResult<Outcome> {
    if cfg.n < 4 {
        return Err("compare needs n >= 4".into());
    }
    let (profile, _) = data(cfg)?;
    let region = Region::sigma1(cfg.n, cfg.r_big, lemma_constants(cfg.n / 2)?.delta)?;
    let pts: Vec<(f64, f64)> = RegionGrid::random(region, cfg.points, cfg.seed)
        .points
        .iter()
        .map(|p| (p.r, p.t))
        .collect();
    let mut fc = FdmConfig::for_points(cfg.n, &pts, cfg.dr);
    fc.cfl = cfg.cfl;
    let cert = compare_with_representation(&profile, cfg.m, &pts, &fc, &quadrature(cfg))?;
    report(cfg, "compare", cert)
}
