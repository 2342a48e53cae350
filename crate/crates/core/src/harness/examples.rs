use std::f64::consts::LN_2;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::InfoMode;
use crate::harness::config::{Example, ExamplesSection, ExperimentConfig};
use crate::measures::{xlogx, Alphabet, ConnectionKernel, ProbVector};
use crate::rates::graph_aep_entropy;
use crate::tree::{is_irreducible, spectral, tree_aep_entropy, OffspringKernel, Spectrum};

/// Bits per vertex for the mitochondrial kernel at `π = (½, ½)`, `p = q = ½`:
/// `1 − (α ln α + (1−α) ln(1−α)) / ln 16`.
pub fn mtdna_formula_bits(alpha: f64) -> f64 {
    1.0 - (xlogx(alpha) + xlogx(1.0 - alpha)) / 16f64.ln()
}

#[derive(Clone, Debug)]
pub struct MtdnaReport {
    pub mean_matrix: Vec<f64>,
    pub spectrum: Spectrum,
    pub irreducible: bool,
    /// Entropy in bits per vertex at `π = (½, ½)`.
    pub bits_half: f64,
    /// Entropy in bits per vertex at the right Perron vector.
    pub bits_right: f64,
    pub formula_bits: f64,
}

pub fn mtdna_report(p: f64, q: f64, alpha: f64) -> Result<MtdnaReport> {
    for (name, v) in [("p", p), ("q", q), ("alpha", alpha)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Config(format!("{name} = {v} is outside [0, 1]")));
        }
    }
    let kernel = OffspringKernel::mtdna(p, q, alpha)?;
    let a = kernel.mean_matrix();
    let spectrum = spectral(&a)?;
    Ok(MtdnaReport {
        mean_matrix: a.table().to_vec(),
        irreducible: is_irreducible(&a),
        bits_half: tree_aep_entropy(&[0.5, 0.5], &kernel)? / LN_2,
        bits_right: tree_aep_entropy(&spectrum.right, &kernel)? / LN_2,
        formula_bits: mtdna_formula_bits(alpha),
        spectrum,
    })
}

#[derive(Clone, Debug)]
pub struct MetabolicReport {
    /// Sparse-regime entropy constant in bits.
    pub h_bits: f64,
    /// `(2C(a,b) + C(a,a) + C(b,b)) / (8 ln 2)`, meaningful at `μ = (½, ½)`.
    pub formula_bits: f64,
    pub n: usize,
    /// `H · n ln n`, the bit count for a graph on `n` vertices at `a_n = 1/n`.
    pub total_bits: f64,
}

pub fn metabolic_report(c: &[f64], mu: &[f64], n: usize) -> Result<MetabolicReport> {
    if c.len() != 4 || mu.len() != 2 {
        return Err(Error::Config("the metabolic example has two colours: c needs 4 entries, mu 2".into()));
    }
    if n < 2 {
        return Err(Error::Config("the metabolic example needs n ≥ 2".into()));
    }
    let al = Alphabet::new(["a", "b"])?;
    let kernel = ConnectionKernel::new(al.clone(), c.to_vec()).map_err(|e| Error::Config(e.to_string()))?;
    let law = ProbVector::new(al, mu.to_vec()).map_err(|e| Error::Config(e.to_string()))?;
    let h_bits = graph_aep_entropy(&law, &kernel, InfoMode::SparseThm)?;
    let nf = n as f64;
    Ok(MetabolicReport {
        h_bits,
        formula_bits: (2.0 * c[1] + c[0] + c[3]) / (8.0 * LN_2),
        n,
        total_bits: h_bits * nf * nf.ln(),
    })
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.12}")).collect();
    format!("({})", parts.join(", "))
}

pub fn run_examples(cfg: &ExperimentConfig) -> Result<String> {
    let ex: &ExamplesSection = cfg.examples.as_ref().ok_or_else(|| Error::Config("missing [examples] section".into()))?;
    let mut out = String::new();
    match ex.which {
        Example::Mtdna => {
            let r = mtdna_report(ex.p, ex.q, ex.alpha)?;
            let m = &r.mean_matrix;
            let _ = writeln!(out, "mtDNA kernel, p = {}, q = {}, alpha = {}", ex.p, ex.q, ex.alpha);
            let _ = writeln!(out, "mean matrix A (row: child type, column: parent type)");
            let _ = writeln!(out, "  [{:.6} {:.6}]\n  [{:.6} {:.6}]", m[0], m[1], m[2], m[3]);
            let _ = writeln!(out, "spectral radius rho = {:.12}", r.spectrum.rho);
            let _ = writeln!(out, "right eigenvector = {}", vector(&r.spectrum.right));
            let _ = writeln!(out, "left eigenvector = {}", vector(&r.spectrum.left));
            let _ = writeln!(out, "irreducible = {}", r.irreducible);
            let _ = writeln!(out, "bits per vertex at pi = (1/2, 1/2): {:.12}", r.bits_half);
            let _ = writeln!(out, "closed-form bits per vertex: {:.12}", r.formula_bits);
            let _ = writeln!(out, "bits per vertex at the right eigenvector: {:.12}", r.bits_right);
            if !r.irreducible {
                let _ = writeln!(
                    out,
                    "caveat: A is reducible, so the irreducible-kernel theorem does not apply as stated; \
                     the right eigenvector puts all mass on type b and the (1/2, 1/2) weighting is the \
                     left eigenvector, not the limiting type frequency"
                );
            }
        }
        Example::Metabolic => {
            let c = ex.c.clone().unwrap_or_else(|| vec![1.0; 4]);
            let mu = ex.mu.clone().unwrap_or_else(|| vec![0.5, 0.5]);
            let r = metabolic_report(&c, &mu, ex.n)?;
            let _ = writeln!(out, "metabolic network, mu = {}, C = {}", vector(&mu), vector(&c));
            let _ = writeln!(out, "sparse-regime H = {:.12} bits (per a_n n^2 ln n)", r.h_bits);
            let _ = writeln!(out, "closed form (2C(a,b) + C(a,a) + C(b,b)) / (8 ln 2) = {:.12} bits", r.formula_bits);
            let _ = writeln!(out, "n = {}, a_n = 1/n: about H n ln n = {:.6} bits", r.n, r.total_bits);
        }
    }
    Ok(out)
}
