use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{ColouredGraph, GraphLaw};
use crate::numerics::{binary_entropy, CompensatedSum};

/// Which normalization of `−log P_n(X)` to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfoMode {
    /// Divide by `a_n n² ln n` (dense-ish regime, `a_n n ln n → ∞`).
    SparseThm,
    /// Divide by `n` (`a_n = 1/(n ln n)` regime).
    CriticalThm,
}

impl InfoMode {
    pub fn normalizer(self, n: usize, a_n: f64) -> f64 {
        let nf = n as f64;
        match self {
            InfoMode::SparseThm => a_n * nf * nf * nf.ln(),
            InfoMode::CriticalThm => nf,
        }
    }
}

impl fmt::Display for InfoMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfoMode::SparseThm => "sparse_thm",
            InfoMode::CriticalThm => "critical_thm",
        })
    }
}

impl FromStr for InfoMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse_thm" | "sparse" => Ok(InfoMode::SparseThm),
            "critical_thm" | "critical" => Ok(InfoMode::CriticalThm),
            _ => Err(Error::parse(format!("unknown information mode {s:?}"))),
        }
    }
}

/// Number of vertex pairs `u < v` per unordered colour class, indexed like
/// [`ColouredGraph::edge_class_counts`].
pub(crate) fn pair_class_counts(colour_counts: &[u64]) -> Vec<u64> {
    let k = colour_counts.len();
    let mut pairs = vec![0u64; k * k];
    for a in 0..k {
        let na = colour_counts[a];
        pairs[a * k + a] = na * na.saturating_sub(1) / 2;
        for b in a + 1..k {
            pairs[a * k + b] = na * colour_counts[b];
        }
    }
    pairs
}

/// `count · ln(q)`, treating `0 · ln 0` as zero and `count · ln 0` as `−∞`.
fn count_log(count: u64, log_q: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * log_q
    }
}

/// Exact `log P_n(x)` in nats.
///
/// The product over all `n(n−1)/2` pairs is collapsed onto colour classes:
/// with `N_ab` pairs and `E_ab` edges in class `{a,b}` it contributes
/// `E_ab ln p(a,b) + (N_ab − E_ab) ln(1 − p(a,b))`. A realized zero-probability
/// event yields `−∞`.
pub fn log_prob_graph(x: &ColouredGraph, law: &GraphLaw) -> Result<f64> {
    if x.k() != law.k() {
        return Err(Error::ShapeMismatch { expected: law.k(), got: x.k() });
    }
    if x.n() != law.n() {
        return Err(Error::invalid(format!("graph has {} vertices, law is for n = {}", x.n(), law.n())));
    }
    let k = law.k();
    let mu = law.colour_law().weights();
    let colour_counts = x.colour_counts();
    let edges = x.edge_class_counts();
    let pairs = pair_class_counts(&colour_counts);

    let mut acc = CompensatedSum::new();
    for a in 0..k {
        acc.add(count_log(colour_counts[a], mu[a].ln()));
    }
    for a in 0..k {
        for b in a..k {
            let idx = a * k + b;
            let p = law.p(a, b);
            let e = edges[idx];
            acc.add(count_log(e, p.ln()));
            acc.add(count_log(pairs[idx] - e, (-p).ln_1p()));
        }
    }
    let v = acc.value();
    Ok(if v.is_nan() { f64::NEG_INFINITY } else { v })
}

/// `−log P_n(X)` divided by the normalizer of `mode`.
pub fn normalized_information(x: &ColouredGraph, law: &GraphLaw, mode: InfoMode) -> Result<f64> {
    let lp = log_prob_graph(x, law)?;
    Ok(-lp / mode.normalizer(law.n(), law.a_n()))
}

/// The exact expectation of [`normalized_information`] under `law`:
/// `[n H(μ) + (n(n−1)/2) Σ_{a,b} μ(a) μ(b) h(p(a,b))] / normalizer`, where
/// `h` is the binary entropy.
pub fn expected_information(law: &GraphLaw, mode: InfoMode) -> f64 {
    let n = law.n() as f64;
    let k = law.k();
    let mu = law.colour_law().weights();
    let colour_part = n * law.colour_law().entropy();
    let mut pair = 0.0;
    for a in 0..k {
        for b in 0..k {
            pair += mu[a] * mu[b] * binary_entropy(law.p(a, b));
        }
    }
    (colour_part + 0.5 * n * (n - 1.0) * pair) / mode.normalizer(law.n(), law.a_n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate::all_coloured_graphs;
    use crate::graph::GraphModel;
    use crate::graph::ScalingFamily;
    use crate::measures::{Alphabet, ConnectionKernel, ProbVector};
    use approx::assert_abs_diff_eq;

    fn constant_law(n: usize, mu: Vec<f64>, p: f64) -> GraphLaw {
        let k = mu.len();
        let al = Alphabet::indexed(k).unwrap();
        GraphLaw::new(n, 1.0, ProbVector::new(al, mu).unwrap(), vec![p; k * k]).unwrap()
    }

    #[test]
    fn single_vertex() {
        let law = constant_law(1, vec![0.3, 0.7], 0.5);
        let g = ColouredGraph::new(2, vec![0], vec![]).unwrap();
        assert_abs_diff_eq!(log_prob_graph(&g, &law).unwrap(), 0.3f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn two_vertices_one_edge() {
        let law = constant_law(2, vec![0.3, 0.7], 0.5);
        let g = ColouredGraph::new(2, vec![0, 0], vec![(0, 1)]).unwrap();
        let want = 2.0 * 0.3f64.ln() + 0.5f64.ln();
        assert_abs_diff_eq!(log_prob_graph(&g, &law).unwrap(), want, epsilon = 1e-15);
    }

    #[test]
    fn exhaustive_normalization_n3() {
        let law = constant_law(3, vec![0.6, 0.4], 0.3);
        let total: f64 = all_coloured_graphs(3, 2).map(|g| log_prob_graph(&g, &law).unwrap().exp()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn impossible_events_are_minus_infinity() {
        let law = constant_law(2, vec![0.5, 0.5], 0.0);
        let g = ColouredGraph::new(2, vec![0, 1], vec![(0, 1)]).unwrap();
        assert_eq!(log_prob_graph(&g, &law).unwrap(), f64::NEG_INFINITY);
        let law = constant_law(2, vec![0.5, 0.5], 1.0);
        let g = ColouredGraph::new(2, vec![0, 1], vec![]).unwrap();
        assert_eq!(log_prob_graph(&g, &law).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn deterministic_complete_graph_carries_no_information() {
        let al = Alphabet::new(["a"]).unwrap();
        let model = GraphModel::new(
            ProbVector::new(al.clone(), vec![1.0]).unwrap(),
            ConnectionKernel::constant(al, 1e12).unwrap(),
            ScalingFamily::InvNLogN,
        )
        .unwrap();
        let law = model.law(6).unwrap();
        let edges = (0..6).flat_map(|u| (u + 1..6).map(move |v| (u, v))).collect();
        let g = ColouredGraph::new(1, vec![0; 6], edges).unwrap();
        assert_eq!(normalized_information(&g, &law, InfoMode::CriticalThm).unwrap(), 0.0);
        assert_eq!(expected_information(&law, InfoMode::CriticalThm), 0.0);
    }

    #[test]
    fn normalized_information_spot_values() {
        // n = 3, μ = (0.6, 0.4), constant p = 0.3, colours (a,b,b), edge (1,2)
        let law = constant_law(3, vec![0.6, 0.4], 0.3);
        let g = ColouredGraph::new(2, vec![0, 1, 1], vec![(1, 2)]).unwrap();
        let lp = 0.6f64.ln() + 2.0 * 0.4f64.ln() + 0.3f64.ln() + 2.0 * 0.7f64.ln();
        assert_abs_diff_eq!(
            normalized_information(&g, &law, InfoMode::CriticalThm).unwrap(),
            -lp / 3.0,
            epsilon = 1e-14
        );
        // same graph, sparse normalization with a_n = 1: divide by 9 ln 3
        assert_abs_diff_eq!(
            normalized_information(&g, &law, InfoMode::SparseThm).unwrap(),
            -lp / (9.0 * 3f64.ln()),
            epsilon = 1e-14
        );
    }

    #[test]
    fn expected_information_examples() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let model = GraphModel::new(
            ProbVector::new(al.clone(), vec![0.6, 0.4]).unwrap(),
            ConnectionKernel::constant(al.clone(), 0.0).unwrap(),
            ScalingFamily::InvNLogN,
        )
        .unwrap();
        let law = model.law(100).unwrap();
        let h = -(0.6f64 * 0.6f64.ln() + 0.4 * 0.4f64.ln());
        assert_abs_diff_eq!(expected_information(&law, InfoMode::CriticalThm), h, epsilon = 1e-15);

        // exact mean over the 64 graphs of size 3 equals the closed form
        let law = constant_law(3, vec![0.6, 0.4], 0.3);
        let mean: f64 = all_coloured_graphs(3, 2)
            .map(|g| {
                let lp = log_prob_graph(&g, &law).unwrap();
                -lp.exp() * lp / 3.0
            })
            .sum();
        assert_abs_diff_eq!(expected_information(&law, InfoMode::CriticalThm), mean, epsilon = 1e-13);
    }

    #[test]
    fn pair_counts() {
        assert_eq!(pair_class_counts(&[3, 2]), vec![3, 6, 0, 1]);
    }
}
