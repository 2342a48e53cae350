use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{InfoMode, ScalingFamily};
use crate::measures::{
    h_c, kernel_product, relative_entropy, ConnectionKernel, ExtReal, PairMeasure, ProbVector, MEASURE_TOL,
};
use crate::tree::{shift_invariance_residual, OffspringKernel, OffspringMeasure};

/// A rate-function value with a note on which branch produced `+∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateResult {
    pub value: ExtReal,
    pub witness: Option<String>,
}

impl RateResult {
    fn finite(v: f64) -> Self {
        Self { value: ExtReal::Finite(v), witness: None }
    }

    fn from_ext(value: ExtReal, why: impl FnOnce() -> String) -> Self {
        let witness = (!value.is_finite()).then(why);
        Self { value, witness }
    }

    fn infinite(why: String) -> Self {
        Self { value: ExtReal::Infinite, witness: Some(why) }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

impl fmt::Display for RateResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            Some(w) => write!(f, "{} ({w})", self.value),
            None => write!(f, "{}", self.value),
        }
    }
}

/// `J(ν) = H(ν ‖ ν₁ ⊗ Q)` for shift-invariant `ν`, `+∞` otherwise.
pub fn rate_j(nu: &OffspringMeasure, kernel: &OffspringKernel) -> Result<RateResult> {
    if nu.k() != kernel.k() {
        return Err(Error::ShapeMismatch { expected: kernel.k(), got: nu.k() });
    }
    let residual = shift_invariance_residual(nu);
    if residual >= MEASURE_TOL {
        return Ok(RateResult::infinite(format!("not shift-invariant (residual {residual:e})")));
    }
    let marginal = nu.type_marginal();
    let mut h = 0.0;
    for ((b, c), &w) in nu.iter() {
        if w == 0.0 {
            continue;
        }
        let reference = marginal[*b] * kernel.prob(*b, c);
        if reference == 0.0 {
            return Ok(RateResult::infinite(format!("ν charges ({b}, {c}) where ν₁⊗Q vanishes")));
        }
        h += w * (w / reference).ln();
    }
    Ok(RateResult::finite(h.max(0.0)))
}

fn shapes(omega: &ProbVector, varpi: &PairMeasure, mu: &ProbVector, c: &ConnectionKernel) -> Result<()> {
    let k = c.k();
    for got in [omega.len(), varpi.k(), mu.len()] {
        if got != k {
            return Err(Error::ShapeMismatch { expected: k, got });
        }
    }
    Ok(())
}

fn half_h_c(omega: &ProbVector, varpi: &PairMeasure, c: &ConnectionKernel) -> Result<RateResult> {
    let v = h_c(varpi, omega, c)?.scale(0.5);
    Ok(RateResult::from_ext(v, || "ϖ not absolutely continuous w.r.t. Cω⊗ω".into()))
}

fn colour_entropy(omega: &ProbVector, mu: &ProbVector) -> Result<RateResult> {
    let v = relative_entropy(omega, mu)?;
    Ok(RateResult::from_ext(v, || "ω not absolutely continuous w.r.t. μ".into()))
}

/// `I(ω, ϖ) = H(ω‖μ) + ½ 𝔥_C(ϖ‖ω)`.
pub fn rate_i(omega: &ProbVector, varpi: &PairMeasure, mu: &ProbVector, c: &ConnectionKernel) -> Result<RateResult> {
    shapes(omega, varpi, mu, c)?;
    let colour = colour_entropy(omega, mu)?;
    let edges = half_h_c(omega, varpi, c)?;
    Ok(RateResult { value: colour.value + edges.value, witness: colour.witness.or(edges.witness) })
}

/// `I₁(ω, ϖ) = ½ 𝔥_C(ϖ‖ω)`.
pub fn rate_i1(omega: &ProbVector, varpi: &PairMeasure, mu: &ProbVector, c: &ConnectionKernel) -> Result<RateResult> {
    shapes(omega, varpi, mu, c)?;
    half_h_c(omega, varpi, c)
}

/// `I₂(ω, ϖ) = H(ω‖μ)` if `ϖ = Cω⊗ω`, `+∞` otherwise.
pub fn rate_i2(omega: &ProbVector, varpi: &PairMeasure, mu: &ProbVector, c: &ConnectionKernel) -> Result<RateResult> {
    shapes(omega, varpi, mu, c)?;
    let d = varpi.sup_distance(&kernel_product(c, omega)?);
    if d > MEASURE_TOL {
        return Ok(RateResult::infinite(format!("ϖ ≠ Cω⊗ω (sup distance {d:e} > {MEASURE_TOL:e})")));
    }
    colour_entropy(omega, mu)
}

/// `I₃(ω, ϖ) = ½ 𝔥_C(ϖ‖ω)` if `ω = μ`, `+∞` otherwise.
pub fn rate_i3(omega: &ProbVector, varpi: &PairMeasure, mu: &ProbVector, c: &ConnectionKernel) -> Result<RateResult> {
    shapes(omega, varpi, mu, c)?;
    let d = omega.sup_distance(mu);
    if d > MEASURE_TOL {
        return Ok(RateResult::infinite(format!("ω ≠ μ (sup distance {d:e} > {MEASURE_TOL:e})")));
    }
    half_h_c(omega, varpi, c)
}

/// `I₄(ω, ϖ) = H(ω‖μ)`.
pub fn rate_i4(omega: &ProbVector, varpi: &PairMeasure, mu: &ProbVector, c: &ConnectionKernel) -> Result<RateResult> {
    shapes(omega, varpi, mu, c)?;
    colour_entropy(omega, mu)
}

/// The AEP entropy constant in bits.
///
/// * critical: `[½ Σ μ(a)C(a,b)μ(b) − Σ μ(a) ln μ(a)] / ln 2`, per vertex;
/// * sparse: `½ Σ μ(a)C(a,b)μ(b) / ln 2`, per `a_n n² ln n`.
pub fn graph_aep_entropy(mu: &ProbVector, c: &ConnectionKernel, mode: InfoMode) -> Result<f64> {
    if mu.len() != c.k() {
        return Err(Error::ShapeMismatch { expected: c.k(), got: mu.len() });
    }
    let q = c.quadratic_form(mu);
    let nats = match mode {
        InfoMode::CriticalThm => 0.5 * q + mu.entropy(),
        InfoMode::SparseThm => 0.5 * q,
    };
    Ok(nats / std::f64::consts::LN_2)
}

/// Relative error of `(1 + α p_n)^{1/a_n}` against `e^{α C}` with
/// `p_n = min(1, a_n C)`, evaluated in log space.
pub fn euler_check(alpha: f64, c_val: f64, family: &ScalingFamily, n: u64) -> Result<f64> {
    if !(c_val >= 0.0 && c_val.is_finite() && alpha.is_finite()) {
        return Err(Error::invalid("α must be finite and C(a,b) finite and nonnegative"));
    }
    let a_n = family.a_n(n)?;
    if a_n * alpha.abs() * c_val >= 1.0 {
        return Err(Error::invalid(format!("a_n |α| C = {} is not below 1", a_n * alpha.abs() * c_val)));
    }
    let p = (a_n * c_val).min(1.0);
    let log_lhs = (alpha * p).ln_1p() / a_n;
    Ok((log_lhs - alpha * c_val).exp_m1().abs())
}
