//! One-dimensional rules on smooth integrands and the node-count settings
//! shared by the free-solution evaluators.
//!
//! Endpoint square-root weights never reach these rules: callers remove them
//! by trigonometric substitution first, so every integrand seen here is
//! smooth on a closed interval.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    GaussLegendre,
    /// Chebyshev-Gauss (type 1) nodes with Fejér weights, so it integrates
    /// unweighted smooth functions.
    GaussChebyshevType1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_lambda: usize,
    pub nodes_eta: usize,
    pub nodes_xi: usize,
    pub rule: Rule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_lambda: 256,
            nodes_eta: 128,
            nodes_xi: 128,
            rule: Rule::GaussLegendre,
        }
    }
}

pub const MAX_NODES: usize = 8192;

impl QuadratureSpec {
    pub fn new(nodes_lambda: usize, nodes_eta: usize, nodes_xi: usize) -> Self {
        QuadratureSpec {
            nodes_lambda,
            nodes_eta,
            nodes_xi,
            rule: Rule::GaussLegendre,
        }
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("nodes_lambda", self.nodes_lambda),
            ("nodes_eta", self.nodes_eta),
            ("nodes_xi", self.nodes_xi),
        ] {
            if n < 8 {
                return Err(Error::InvalidParameter(format!("{name} = {n} < 8")));
            }
            if n > MAX_NODES {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {n} exceeds {MAX_NODES}"
                )));
            }
        }
        Ok(())
    }

    /// Every node count doubled, capped at [`MAX_NODES`].
    pub fn doubled(&self) -> Self {
        QuadratureSpec {
            nodes_lambda: (2 * self.nodes_lambda).min(MAX_NODES),
            nodes_eta: (2 * self.nodes_eta).min(MAX_NODES),
            nodes_xi: (2 * self.nodes_xi).min(MAX_NODES),
            rule: self.rule,
        }
    }

    pub fn at_cap(&self) -> bool {
        self.nodes_lambda >= MAX_NODES && self.nodes_eta >= MAX_NODES && self.nodes_xi >= MAX_NODES
    }
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct ReferenceRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ReferenceRule {
    /// Integral of `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Mapped `(node, weight)` pairs for `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn gauss_legendre(n: usize) -> ReferenceRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess, then Newton on P_n.
        let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    ReferenceRule { nodes, weights }
}

/// Fejér's first rule: Chebyshev-Gauss nodes with weights that integrate
/// unweighted smooth functions spectrally.
fn fejer_first(n: usize) -> ReferenceRule {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let th = PI * (2 * i + 1) as f64 / (2 * n) as f64;
        let tail: f64 = (1..=n / 2)
            .map(|j| (2.0 * j as f64 * th).cos() / (4.0 * (j * j) as f64 - 1.0))
            .sum();
        nodes.push(-th.cos());
        weights.push(2.0 / n as f64 * (1.0 - 2.0 * tail));
    }
    ReferenceRule { nodes, weights }
}

type Cache = Mutex<HashMap<(Rule, usize), Arc<ReferenceRule>>>;

/// Reference rule with `n` nodes, computed once per `(rule, n)`.
pub fn reference_rule(rule: Rule, n: usize) -> Arc<ReferenceRule> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache poisoned").get(&(rule, n)) {
        return Arc::clone(r);
    }
    let built = Arc::new(match rule {
        Rule::GaussLegendre => gauss_legendre(n),
        Rule::GaussChebyshevType1 => fejer_first(n),
    });
    cache
        .lock()
        .expect("rule cache poisoned")
        .entry((rule, n))
        .or_insert(built)
        .clone()
}

/// Trapezoid rule on a full period: `n` equispaced angles in `[0, 2pi)`.
pub fn periodic_angles(n: usize) -> impl Iterator<Item = (f64, f64)> {
    let w = 2.0 * PI / n as f64;
    (0..n).map(move |i| (w * i as f64, w))
}
