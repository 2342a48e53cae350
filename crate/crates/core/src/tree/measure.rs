use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measures::ProbVector;
use crate::numerics::CompensatedSum;
use crate::tree::{OffspringConfig, OffspringKernel, TypedTree};

/// A measure on (type, configuration) pairs, e.g. the empirical offspring
/// measure `M_X` or the product `π ⊗ Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct OffspringMeasure {
    k: usize,
    weights: BTreeMap<(usize, OffspringConfig), f64>,
}

impl OffspringMeasure {
    pub fn new(k: usize, weights: BTreeMap<(usize, OffspringConfig), f64>) -> Result<Self> {
        for ((a, c), w) in &weights {
            if *a >= k || c.types().iter().any(|&t| t >= k) {
                return Err(Error::invalid(format!("type out of range in ({a}, {c})")));
            }
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::invalid(format!("bad weight {w} on ({a}, {c})")));
            }
        }
        Ok(Self { k, weights })
    }

    /// `π ⊗ Q (a, c) = π(a) Q{c | a}`; zero entries are left out.
    pub fn product(pi: &[f64], kernel: &OffspringKernel) -> Result<Self> {
        let k = kernel.k();
        if pi.len() != k {
            return Err(Error::ShapeMismatch { expected: k, got: pi.len() });
        }
        let mut weights = BTreeMap::new();
        for (a, &pa) in pi.iter().enumerate() {
            for (c, p) in kernel.row(a) {
                if pa * p > 0.0 {
                    weights.insert((a, c.clone()), pa * p);
                }
            }
        }
        Self::new(k, weights)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, a: usize, c: &OffspringConfig) -> f64 {
        self.weights.get(&(a, c.clone())).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, OffspringConfig), &f64)> {
        self.weights.iter()
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    /// `ν₁(a) = Σ_c ν(a, c)`.
    pub fn type_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.k];
        for ((a, _), w) in &self.weights {
            m[*a] += w;
        }
        m
    }

    /// `Σ_{(b,c)} m(a, c) ν(b, c)` for each `a`.
    pub fn child_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.k];
        for ((_, c), w) in &self.weights {
            for &t in c.types() {
                m[t] += w;
            }
        }
        m
    }

    /// `sup |ν(a, c) − ρ(a, c)|` over the union of both supports.
    pub fn sup_distance(&self, other: &OffspringMeasure) -> f64 {
        let mut d = 0.0f64;
        for (key, w) in &self.weights {
            d = d.max((w - other.weights.get(key).copied().unwrap_or(0.0)).abs());
        }
        for (key, w) in &other.weights {
            if !self.weights.contains_key(key) {
                d = d.max(w.abs());
            }
        }
        d
    }
}

/// `M_X(a, c) = |T|⁻¹ #{v : (X(v), C(v)) = (a, c)}`.
pub fn offspring_measure(t: &TypedTree) -> OffspringMeasure {
    let n = t.size() as f64;
    let mut counts: BTreeMap<(usize, OffspringConfig), f64> = BTreeMap::new();
    for key in t.configs() {
        *counts.entry(key).or_insert(0.0) += 1.0;
    }
    counts.values_mut().for_each(|w| *w /= n);
    OffspringMeasure { k: t.k(), weights: counts }
}

/// `max_a |ν₁(a) − Σ_{(b,c)} m(a,c) ν(b,c)|`; zero exactly for
/// shift-invariant measures.
pub fn shift_invariance_residual(nu: &OffspringMeasure) -> f64 {
    nu.type_marginal()
        .iter()
        .zip(nu.child_marginal())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn check_tree(t: &TypedTree, mu: &ProbVector, kernel: &OffspringKernel) -> Result<()> {
    if t.k() != kernel.k() || mu.len() != kernel.k() {
        return Err(Error::ShapeMismatch { expected: kernel.k(), got: t.k().max(mu.len()) });
    }
    Ok(())
}

/// Unconditioned `log P(T = t) = log μ(root) + Σ_v log Q{C(v) | X(v)}`.
/// `−∞` when any factor vanishes.
pub fn log_prob_tree(t: &TypedTree, mu: &ProbVector, kernel: &OffspringKernel) -> Result<f64> {
    check_tree(t, mu, kernel)?;
    let mut acc = CompensatedSum::new();
    acc.add(mu.weights()[t.root_type()].ln());
    for (a, c) in t.configs() {
        acc.add(kernel.prob(a, &c).ln());
    }
    let v = acc.value();
    Ok(if v.is_nan() { f64::NEG_INFINITY } else { v })
}

/// `log P_n(t) = log P(T = t) − log P{|T| = n}` with `n = |t|`.
pub fn log_prob_tree_conditioned(
    t: &TypedTree,
    mu: &ProbVector,
    kernel: &OffspringKernel,
    p_size: f64,
) -> Result<f64> {
    if !(p_size > 0.0 && p_size <= 1.0 + 1e-12) {
        return Err(Error::invalid(format!("P{{|T| = {}}} = {p_size} is not a positive probability", t.size())));
    }
    Ok(log_prob_tree(t, mu, kernel)? - p_size.ln())
}

/// `−Σ_a π(a) Σ_c Q{c|a} log Q{c|a}` in nats.
pub fn tree_aep_entropy(pi: &[f64], kernel: &OffspringKernel) -> Result<f64> {
    if pi.len() != kernel.k() {
        return Err(Error::ShapeMismatch { expected: kernel.k(), got: pi.len() });
    }
    Ok(pi
        .iter()
        .enumerate()
        .map(|(a, &w)| {
            let h: f64 = kernel.row(a).iter().filter(|(_, p)| *p > 0.0).map(|(_, p)| -p * p.ln()).sum();
            w * h
        })
        .sum())
}
