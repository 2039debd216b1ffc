//! Plain-text `key = value` run configuration.
//!
//! Resolution order: built-in defaults, then the config file, then flags.
//! [`RunConfig::manifest`] writes every resolved key back out, so a
//! manifest is itself a valid config file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use wavebound::bounds::AssumptionKind;

/// Keys a manifest carries for information only; accepted and ignored on input.
const INFORMATIONAL: &[&str] = &["command", "version"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub a: f64,
    pub kappa: f64,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub assumption: AssumptionKind,
    /// `none`, `f`, `g` or `both`: sign flip applied to the data.
    pub negate: String,
    pub r_big: f64,
    pub grid: usize,
    pub samples: usize,
    pub nodes: usize,
    pub tol: f64,
    pub seed: u64,
    pub points: usize,
    pub m_lo: usize,
    pub m_hi: usize,
    pub apex_r: f64,
    pub apex_t: f64,
    pub levels: usize,
    pub max_iters: usize,
    pub threshold: f64,
    pub kappas: Vec<f64>,
    pub dr: f64,
    pub cfl: f64,
    pub r_max: f64,
    pub t_end: f64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value, got {line:?}", i + 1))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(format!("line {}: empty key", i + 1));
            }
            if raw.entries.insert(key.to_string(), v.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key {key}", i + 1));
            }
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// `k=v` as given on the command line.
    pub fn set_pair(&mut self, pair: &str, prefix: &str) -> Result<(), String> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected k=v, got {pair:?}"))?;
        self.set(&format!("{prefix}{}", k.trim()), v.trim());
        Ok(())
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T, String> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("{key}: cannot parse {v:?}")),
        }
    }

    pub fn resolve(mut self) -> Result<RunConfig, String> {
        let n: usize = self.num("n", 5)?;
        if n < 2 {
            return Err(format!("n must be >= 2, got {n}"));
        }
        let m = self.num("m", (n / 2).max(2))?;
        let default_assumption = if n <= 3 {
            AssumptionKind::Low
        } else if n % 2 == 1 {
            AssumptionKind::Odd2
        } else {
            AssumptionKind::Even
        };
        let assumption = match self.take("assumption") {
            None => default_assumption,
            Some(s) => AssumptionKind::parse(&s).map_err(|e| e.to_string())?,
        };
        let negate = self.take("negate").unwrap_or_else(|| "none".into());
        if !["none", "f", "g", "both"].contains(&negate.as_str()) {
            return Err(format!("negate must be none, f, g or both, got {negate:?}"));
        }
        let (m_lo, m_hi) = match self.take("m_range") {
            None => (2, 8),
            Some(s) => parse_range(&s)?,
        };
        let kappas = match self.take("kappas") {
            None => vec![0.5, 1.0, 1.5, 2.0, 3.0],
            Some(s) => parse_list(&s)?,
        };
        let cfg = RunConfig {
            n,
            m,
            p: self.num("p", 2.0)?,
            a: self.num("a", 1.0)?,
            kappa: self.num("kappa", 0.5)?,
            family: self.take("family").unwrap_or_else(|| "power".into()),
            assumption,
            negate,
            r_big: self.num("R", 1.0)?,
            grid: self.num("grid", 64)?,
            samples: self.num("samples", 128)?,
            nodes: self.num("nodes", 64)?,
            tol: self.num("tol", wavebound::certificate::DEFAULT_TOLERANCE)?,
            seed: self.num("seed", 1)?,
            points: self.num("points", 20)?,
            m_lo,
            m_hi,
            apex_r: self.num("apex_r", 920.0)?,
            apex_t: self.num("apex_t", 300.0)?,
            levels: self.num("levels", if n <= 3 { 32 } else { 128 })?,
            max_iters: self.num("max_iters", wavebound::blowup::DEFAULT_MAX_ITERS)?,
            threshold: self.num("threshold", wavebound::blowup::DEFAULT_THRESHOLD)?,
            kappas,
            dr: self.num("dr", 0.02)?,
            cfl: self.num("cfl", 0.5)?,
            r_max: self.num("r_max", 40.0)?,
            t_end: self.num("t_end", 5.0)?,
            out: PathBuf::from(self.take("out").unwrap_or_else(|| "out".into())),
            params: BTreeMap::new(),
        };
        let mut cfg = cfg;
        for (k, v) in std::mem::take(&mut self.entries) {
            if let Some(name) = k.strip_prefix("param.") {
                let x: f64 = v.parse().map_err(|_| format!("{k}: cannot parse {v:?}"))?;
                cfg.params.insert(name.to_string(), x);
            } else if !INFORMATIONAL.contains(&k.as_str()) {
                return Err(format!("unknown config key {k:?}"));
            }
        }
        if !(cfg.tol >= 0.0) {
            return Err(format!("tol must be >= 0, got {}", cfg.tol));
        }
        if cfg.grid < 2 || cfg.samples < 2 || cfg.nodes < 16 {
            return Err("need grid >= 2, samples >= 2 and nodes >= 16".into());
        }
        Ok(cfg)
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("m_range: expected lo..hi, got {s:?}"))?;
    let lo = a.trim().parse().map_err(|_| format!("m_range: bad bound {a:?}"))?;
    let hi = b.trim().parse().map_err(|_| format!("m_range: bad bound {b:?}"))?;
    Ok((lo, hi))
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("kappas: bad value {x:?}")))
        .collect()
}

impl RunConfig {
    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    /// Every resolved key, in a fixed order, as a loadable config file.
    pub fn manifest(&self, command: &str) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("command", command.to_string());
        kv("version", env!("CARGO_PKG_VERSION").to_string());
        kv("n", self.n.to_string());
        kv("m", self.m.to_string());
        kv("p", self.p.to_string());
        kv("a", self.a.to_string());
        kv("kappa", self.kappa.to_string());
        kv("family", self.family.clone());
        for (k, v) in &self.params {
            kv(&format!("param.{k}"), v.to_string());
        }
        kv("assumption", self.assumption.name().to_string());
        kv("negate", self.negate.clone());
        kv("R", self.r_big.to_string());
        kv("grid", self.grid.to_string());
        kv("samples", self.samples.to_string());
        kv("nodes", self.nodes.to_string());
        kv("tol", self.tol.to_string());
        kv("seed", self.seed.to_string());
        kv("points", self.points.to_string());
        kv("m_range", format!("{}..{}", self.m_lo, self.m_hi));
        kv("apex_r", self.apex_r.to_string());
        kv("apex_t", self.apex_t.to_string());
        kv("levels", self.levels.to_string());
        kv("max_iters", self.max_iters.to_string());
        kv("threshold", self.threshold.to_string());
        let ks: Vec<String> = self.kappas.iter().map(f64::to_string).collect();
        kv("kappas", ks.join(","));
        kv("dr", self.dr.to_string());
        kv("cfl", self.cfl.to_string());
        kv("r_max", self.r_max.to_string());
        kv("t_end", self.t_end.to_string());
        kv("out", self.out.display().to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_dimension() {
        let mut raw = RawConfig::default();
        raw.set("n", 4);
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.m, 2);
        assert_eq!(cfg.assumption, AssumptionKind::Even);
    }

    #[test]
    fn manifest_round_trips() {
        let mut raw = RawConfig::parse("n = 7\nparam.width = 2.5\nkappas = 1,2\nm_range = 3..2\n").unwrap();
        raw.set("tol", 0.1);
        let cfg = raw.resolve().unwrap();
        let again = RawConfig::parse(&cfg.manifest("x")).unwrap().resolve().unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_garbage() {
        assert!(RawConfig::parse("no equals sign").is_err());
        assert!(RawConfig::parse("n = 1\nn = 2").is_err());
        assert!(RawConfig::parse("bogus = 1").unwrap().resolve().is_err());
        assert!(RawConfig::parse("n = five").unwrap().resolve().is_err());
    }
}
