//! Sampled verification results.
//!
//! A certificate records the smallest `LHS - RHS` margin seen over a sweep.
//! Sweeps are split across threads and the partial certificates merged;
//! [`Certificate::merge`] is associative and keeps the first of equal worst
//! points, so a parallel sweep reports the same thing as a sequential one.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Default absolute tolerance on margins.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Violations kept verbatim per certificate; the rest are only counted.
pub const MAX_STORED_VIOLATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub point: Vec<f64>,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub inequality_id: String,
    pub region: String,
    /// Names of the coordinates in `worst_point` and violation points.
    pub coordinates: Vec<String>,
    pub samples: usize,
    pub worst_margin: f64,
    pub worst_point: Vec<f64>,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    pub tolerance: f64,
    /// Derived constants and other scalars worth reporting (e.g. `C4`).
    pub constants: BTreeMap<String, f64>,
}

impl Certificate {
    pub fn new(
        inequality_id: impl Into<String>,
        region: impl Into<String>,
        coordinates: &[&str],
        tolerance: f64,
    ) -> Self {
        Certificate {
            inequality_id: inequality_id.into(),
            region: region.into(),
            coordinates: coordinates.iter().map(|s| s.to_string()).collect(),
            samples: 0,
            worst_margin: f64::INFINITY,
            worst_point: Vec::new(),
            violation_count: 0,
            violations: Vec::new(),
            tolerance,
            constants: BTreeMap::new(),
        }
    }

    /// An empty certificate with the same identity, for fan-out.
    pub fn empty_like(&self) -> Self {
        let mut c = Certificate::new(
            self.inequality_id.clone(),
            self.region.clone(),
            &[],
            self.tolerance,
        );
        c.coordinates = self.coordinates.clone();
        c
    }

    pub fn with_constant(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_string(), value);
        self
    }

    /// Records one sample. NaN margins count as violations.
    pub fn record(&mut self, point: &[f64], margin: f64) {
        let margin = if margin.is_nan() {
            f64::NEG_INFINITY
        } else {
            margin
        };
        self.samples += 1;
        if margin < self.worst_margin || self.worst_point.is_empty() {
            self.worst_margin = margin;
            self.worst_point = point.to_vec();
        }
        if margin < -self.tolerance {
            self.violation_count += 1;
            if self.violations.len() < MAX_STORED_VIOLATIONS {
                self.violations.push(Violation {
                    point: point.to_vec(),
                    margin,
                });
            }
        }
    }

    pub fn merge(mut self, other: Certificate) -> Certificate {
        self.samples += other.samples;
        if other.worst_margin < self.worst_margin
            || (self.worst_point.is_empty() && !other.worst_point.is_empty())
        {
            self.worst_margin = other.worst_margin;
            self.worst_point = other.worst_point;
        }
        self.violation_count += other.violation_count;
        let room = MAX_STORED_VIOLATIONS.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
        for (k, v) in other.constants {
            self.constants.entry(k).or_insert(v);
        }
        self
    }

    /// Re-thresholds at `tol`. Stored violations that no longer violate are
    /// dropped; a tighter `tol` cannot recover samples that were never
    /// stored, so it only affects `certified()`.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        let complete = self.violation_count == self.violations.len();
        self.violations.retain(|v| v.margin < -tol);
        if complete {
            self.violation_count = self.violations.len();
        }
        self.tolerance = tol;
        self
    }

    pub fn certified(&self) -> bool {
        self.samples > 0 && self.worst_margin >= -self.tolerance
    }

    pub fn status(&self) -> &'static str {
        if self.certified() {
            "certified"
        } else {
            "violated"
        }
    }

    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("certificate serializes");
        if let Some(obj) = value.as_object_mut() {
            obj.insert("status".into(), self.status().into());
        }
        serde_json::to_string_pretty(&value).expect("certificate serializes")
    }

    /// Violating points as CSV: one column per coordinate plus `margin`.
    pub fn violations_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.coordinates {
            out.push_str(c);
            out.push(',');
        }
        out.push_str("margin\n");
        for v in &self.violations {
            for x in &v.point {
                let _ = write!(out, "{x},");
            }
            let _ = writeln!(out, "{}", v.margin);
        }
        out
    }

    /// One-line human-readable summary.
    pub fn summary(&self) -> String {
        format!(
            "{:<28} {:<9} samples={:<8} worst_margin={:+.6e} violations={}",
            self.inequality_id,
            self.status(),
            self.samples,
            self.worst_margin,
            self.violation_count
        )
    }
}
