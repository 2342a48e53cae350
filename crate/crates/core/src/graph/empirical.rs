use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::ColouredGraph;
use crate::measures::{Alphabet, PairMeasure, ProbVector};

fn check_alphabet(x: &ColouredGraph, alphabet: &Alphabet) -> Result<()> {
    if alphabet.len() != x.k() {
        return Err(Error::ShapeMismatch { expected: x.k(), got: alphabet.len() });
    }
    Ok(())
}

/// Empirical colour measure `L¹(a) = #{v : X(v) = a} / n`.
pub fn empirical_colour(x: &ColouredGraph, alphabet: &Arc<Alphabet>) -> Result<ProbVector> {
    check_alphabet(x, alphabet)?;
    let n = x.n() as f64;
    let weights = x.colour_counts().into_iter().map(|c| c as f64 / n).collect();
    ProbVector::normalized(alphabet.clone(), weights)
}

/// Empirical pair measure
/// `L²(a,b) = (n² a_n)⁻¹ Σ_{(u,v)∈E} [δ_{(X(v),X(u))} + δ_{(X(u),X(v))}](a,b)`.
pub fn empirical_pair(x: &ColouredGraph, a_n: f64, alphabet: &Arc<Alphabet>) -> Result<PairMeasure> {
    check_alphabet(x, alphabet)?;
    if !(a_n > 0.0) {
        return Err(Error::invalid("a_n must be positive"));
    }
    let k = x.k();
    let n = x.n() as f64;
    let scale = 1.0 / (n * n * a_n);
    let counts = x.edge_class_counts();
    Ok(PairMeasure::from_fn(alphabet.clone(), |a, b| {
        // a diagonal edge puts both of its deltas on (a,a)
        let mult = if a == b { 2.0 } else { 1.0 };
        mult * counts[a * k + b] as f64 * scale
    }))
}

/// The diagonal correction measures that appear when a sum over ordered
/// pairs `u ≠ v` is written through `L¹ ⊗ L¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticMeasures {
    /// `L¹_Δ(a,a) = #{u : X(u) = a} / n`; total mass 1.
    pub l1_delta: Vec<f64>,
    /// `L²_Δ(a,a) = #{u : X(u) = a} / n²`; total mass `1/n`.
    pub l2_delta: Vec<f64>,
}

pub fn diagnostic_measures(x: &ColouredGraph) -> DiagnosticMeasures {
    let n = x.n() as f64;
    let counts = x.colour_counts();
    DiagnosticMeasures {
        l1_delta: counts.iter().map(|&c| c as f64 / n).collect(),
        l2_delta: counts.iter().map(|&c| c as f64 / (n * n)).collect(),
    }
}
