use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionKind {
    /// `r - t >= max{R, delta t} > 0`
    Sigma1,
    /// `|x| - t >= max{R, t - 1}`
    Sigma2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub kind: RegionKind,
    pub r_big: f64,
    /// Only meaningful for `Sigma1`.
    pub delta: f64,
    pub n: usize,
}

/// Relative slack in membership tests, so grid points placed exactly on
/// the boundary count as inside.
const EDGE_SLACK: f64 = 1e-12;

impl Region {
    pub fn sigma1(n: usize, r_big: f64, delta: f64) -> Result<Self> {
        if !(r_big > 0.0) || !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Sigma1 needs R > 0 and delta > 0 (R = {r_big}, delta = {delta})"
            )));
        }
        Ok(Region {
            kind: RegionKind::Sigma1,
            r_big,
            delta,
            n,
        })
    }

    pub fn sigma2(n: usize, r_big: f64) -> Result<Self> {
        if !(r_big > 0.0) {
            return Err(Error::InvalidParameter(format!("Sigma2 needs R > 0 (R = {r_big})")));
        }
        Ok(Region {
            kind: RegionKind::Sigma2,
            r_big,
            delta: 0.0,
            n,
        })
    }

    pub fn contains(&self, r: f64, t: f64) -> bool {
        if !(t > 0.0) || !(r > 0.0) {
            return false;
        }
        let slack = EDGE_SLACK * r;
        match self.kind {
            RegionKind::Sigma1 => r - t + slack >= self.r_big.max(self.delta * t),
            RegionKind::Sigma2 => r - t + slack >= self.r_big.max(t - 1.0),
        }
    }

    /// Largest `t` with `(r, t)` in the region (non-positive if none).
    pub fn t_max(&self, r: f64) -> f64 {
        match self.kind {
            RegionKind::Sigma1 => (r - self.r_big).min(r / (1.0 + self.delta)),
            RegionKind::Sigma2 => (r - self.r_big).min(0.5 * (r + 1.0)),
        }
    }

    /// Default radial sampling range `[R + delta, max(100 R, 10 (R + delta))]`
    /// (`delta` replaced by 1 for `Sigma2`).
    pub fn default_r_range(&self) -> (f64, f64) {
        let gap = match self.kind {
            RegionKind::Sigma1 => self.delta,
            RegionKind::Sigma2 => 1.0,
        };
        let lo = self.r_big + gap;
        (lo, (100.0 * self.r_big).max(10.0 * lo))
    }

    pub fn describe(&self) -> String {
        match self.kind {
            RegionKind::Sigma1 => format!(
                "Sigma1(n={}, R={}, delta={})",
                self.n, self.r_big, self.delta
            ),
            RegionKind::Sigma2 => format!("Sigma2(n={}, R={})", self.n, self.r_big),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub r: f64,
    pub t: f64,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionGrid {
    pub region: Region,
    pub points: Vec<RegionPoint>,
}

impl RegionGrid {
    /// `nr` log-spaced radii over `[r_lo, r_hi]`; at each radius `nt` times
    /// `t_j = t_max(r) (j+1)/nt`.
    pub fn tensor(region: Region, nr: usize, nt: usize, r_lo: f64, r_hi: f64) -> Result<Self> {
        if nr < 1 || nt < 1 || !(r_lo > region.r_big) || !(r_hi >= r_lo) {
            return Err(Error::InvalidParameter(format!(
                "grid needs nr, nt >= 1 and R < r_lo <= r_hi (R = {}, r_lo = {r_lo}, r_hi = {r_hi})",
                region.r_big
            )));
        }
        let mut points = Vec::with_capacity(nr * nt);
        for i in 0..nr {
            let s = if nr == 1 { 0.0 } else { i as f64 / (nr - 1) as f64 };
            let r = r_lo * (r_hi / r_lo).powf(s);
            let tm = region.t_max(r);
            for j in 0..nt {
                let t = tm * (j + 1) as f64 / nt as f64;
                points.push(RegionPoint {
                    r,
                    t,
                    inside: region.contains(r, t),
                });
            }
        }
        Ok(RegionGrid { region, points })
    }

    /// The default 64 x 64 grid over [`Region::default_r_range`].
    pub fn default_for(region: Region) -> Result<Self> {
        Self::with_size(region, 64)
    }

    pub fn with_size(region: Region, size: usize) -> Result<Self> {
        let (lo, hi) = region.default_r_range();
        Self::tensor(region, size, size, lo, hi)
    }

    /// `count` points with log-uniform `r` in the default range and `t`
    /// uniform in `(0, t_max(r)]`.
    pub fn random(region: Region, count: usize, seed: u64) -> Self {
        let (lo, hi) = region.default_r_range();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| {
                let r = lo * (hi / lo).powf(rng.gen::<f64>());
                let t = region.t_max(r) * (1.0 - rng.gen::<f64>());
                RegionPoint {
                    r,
                    t,
                    inside: region.contains(r, t),
                }
            })
            .collect();
        RegionGrid { region, points }
    }

    /// Arbitrary points, membership recorded but not enforced.
    pub fn from_points(region: Region, pts: &[(f64, f64)]) -> Self {
        RegionGrid {
            region,
            points: pts
                .iter()
                .map(|&(r, t)| RegionPoint {
                    r,
                    t,
                    inside: region.contains(r, t),
                })
                .collect(),
        }
    }

    pub fn all_inside(&self) -> bool {
        self.points.iter().all(|p| p.inside)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
