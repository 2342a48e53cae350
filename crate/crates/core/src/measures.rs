//! Alphabets, probability vectors, finite and pair measures, and the
//! entropy functionals built on them.
//!
//! Everything here is in nats. Conversion to bits happens where results are
//! reported.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Tolerance for "sums to one" checks on probability vectors.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Tolerance for measure identities (equality of pair measures etc.).
pub const MEASURE_TOL: f64 = 1e-9;

/// A nonnegative extended real: either a finite value or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    /// Lossy conversion for reporting; `+∞` maps to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Infinite => f64::INFINITY,
        }
    }

    pub fn scale(self, factor: f64) -> ExtReal {
        debug_assert!(factor >= 0.0);
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * factor),
            ExtReal::Infinite => ExtReal::Infinite,
        }
    }
}

impl std::ops::Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinite,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

/// A finite, ordered set of distinct symbol names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Arc<Self>> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::invalid("alphabet must contain at least one symbol"));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::invalid(format!("bad symbol name {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::invalid(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Arc::new(Self { symbols }))
    }

    /// Alphabet `0, 1, …, k−1`.
    pub fn indexed(k: usize) -> Result<Arc<Self>> {
        Self::new((0..k).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }
}

fn check_shape(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, got })
    }
}

/// A probability vector over an alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector {
    alphabet: Arc<Alphabet>,
    weights: Vec<f64>,
}

impl ProbVector {
    pub fn new(alphabet: Arc<Alphabet>, weights: Vec<f64>) -> Result<Self> {
        check_shape(alphabet.len(), weights.len())?;
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("probability weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::invalid(format!("probability weights sum to {total}, not 1")));
        }
        Ok(Self { alphabet, weights })
    }

    /// A colour law: every weight must be strictly positive.
    pub fn strictly_positive(alphabet: Arc<Alphabet>, weights: Vec<f64>) -> Result<Self> {
        let p = Self::new(alphabet, weights)?;
        if p.weights.iter().any(|w| *w <= 0.0) {
            return Err(Error::invalid("colour law must be strictly positive"));
        }
        Ok(p)
    }

    /// Normalizes nonnegative weights to sum one.
    pub fn normalized(alphabet: Arc<Alphabet>, weights: Vec<f64>) -> Result<Self> {
        check_shape(alphabet.len(), weights.len())?;
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::invalid("cannot normalize weights"));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { alphabet, weights })
    }

    pub fn uniform(alphabet: Arc<Alphabet>) -> Self {
        let k = alphabet.len();
        Self { alphabet, weights: vec![1.0 / k as f64; k] }
    }

    pub fn point_mass(alphabet: Arc<Alphabet>, index: usize) -> Self {
        let mut weights = vec![0.0; alphabet.len()];
        weights[index] = 1.0;
        Self { alphabet, weights }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().all(|w| *w > 0.0)
    }

    /// Shannon entropy `−Σ p log p` in nats.
    pub fn entropy(&self) -> f64 {
        -self.weights.iter().map(|&p| xlogx(p)).sum::<f64>()
    }

    pub fn to_measure(&self) -> FiniteMeasure {
        FiniteMeasure { alphabet: self.alphabet.clone(), weights: self.weights.clone() }
    }

    /// Sup-norm distance between weights.
    pub fn sup_distance(&self, other: &ProbVector) -> f64 {
        sup_distance(&self.weights, &other.weights)
    }
}

/// A nonnegative, not necessarily normalized, measure on an alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMeasure {
    alphabet: Arc<Alphabet>,
    weights: Vec<f64>,
}

impl FiniteMeasure {
    pub fn new(alphabet: Arc<Alphabet>, weights: Vec<f64>) -> Result<Self> {
        check_shape(alphabet.len(), weights.len())?;
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("measure weights must be finite and nonnegative"));
        }
        Ok(Self { alphabet, weights })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Anything that can act as the first or second argument of a relative
/// entropy on a single alphabet.
pub trait Weights {
    fn weight_slice(&self) -> &[f64];
}

impl Weights for ProbVector {
    fn weight_slice(&self) -> &[f64] {
        &self.weights
    }
}

impl Weights for FiniteMeasure {
    fn weight_slice(&self) -> &[f64] {
        &self.weights
    }
}

impl Weights for PairMeasure {
    fn weight_slice(&self) -> &[f64] {
        &self.table
    }
}

/// A symmetric nonnegative measure on `𝒳 × 𝒳`.
///
/// Each unordered pair is evaluated once and written to both `(a,b)` and
/// `(b,a)` of the row-major table, so `w(a,b) == w(b,a)` bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMeasure {
    alphabet: Arc<Alphabet>,
    table: Vec<f64>,
}

impl PairMeasure {
    /// Builds from a row-major `k×k` table, which must be symmetric to
    /// [`MEASURE_TOL`]. The upper triangle is taken as canonical.
    pub fn from_table(alphabet: Arc<Alphabet>, table: Vec<f64>) -> Result<Self> {
        let k = alphabet.len();
        check_shape(k * k, table.len())?;
        if table.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("pair measure entries must be finite and nonnegative"));
        }
        for a in 0..k {
            for b in 0..a {
                if (table[a * k + b] - table[b * k + a]).abs() > MEASURE_TOL {
                    return Err(Error::invalid("pair measure must be symmetric"));
                }
            }
        }
        Ok(Self::from_fn(alphabet, |a, b| table[a.min(b) * k + a.max(b)]))
    }

    /// Builds from `f(a, b)` evaluated once per unordered pair `a ≤ b`.
    pub fn from_fn(alphabet: Arc<Alphabet>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let k = alphabet.len();
        let mut table = vec![0.0; k * k];
        for a in 0..k {
            for b in a..k {
                let v = f(a, b);
                table[a * k + b] = v;
                table[b * k + a] = v;
            }
        }
        Self { alphabet, table }
    }

    pub fn zero(alphabet: Arc<Alphabet>) -> Self {
        Self::from_fn(alphabet, |_, _| 0.0)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn k(&self) -> usize {
        self.alphabet.len()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.table[a * self.k() + b]
    }

    /// Row-major `k×k` view.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn sup_distance(&self, other: &PairMeasure) -> f64 {
        sup_distance(&self.table, &other.table)
    }
}

/// A symmetric nonnegative table of connection rates `C(a,b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionKernel {
    alphabet: Arc<Alphabet>,
    table: Vec<f64>,
}

impl ConnectionKernel {
    pub fn new(alphabet: Arc<Alphabet>, table: Vec<f64>) -> Result<Self> {
        let k = alphabet.len();
        check_shape(k * k, table.len())?;
        if table.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("connection rates must be finite and nonnegative"));
        }
        for a in 0..k {
            for b in 0..a {
                if table[a * k + b] != table[b * k + a] {
                    return Err(Error::invalid("connection kernel must be symmetric"));
                }
            }
        }
        Ok(Self { alphabet, table })
    }

    pub fn constant(alphabet: Arc<Alphabet>, value: f64) -> Result<Self> {
        let k = alphabet.len();
        Self::new(alphabet, vec![value; k * k])
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn k(&self) -> usize {
        self.alphabet.len()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.table[a * self.k() + b]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|c| *c == 0.0)
    }

    /// `⟨μ, C μ⟩ = Σ_{a,b} μ(a) C(a,b) μ(b)`.
    pub fn quadratic_form(&self, mu: &ProbVector) -> f64 {
        let k = self.k();
        let w = mu.weights();
        let mut s = 0.0;
        for a in 0..k {
            for b in 0..k {
                s += w[a] * self.table[a * k + b] * w[b];
            }
        }
        s
    }
}

/// `x log x` with `0 log 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn relative_entropy_slices(nu: &[f64], rho: &[f64]) -> ExtReal {
    let mut s = 0.0;
    for (&n, &r) in nu.iter().zip(rho) {
        if n == 0.0 {
            continue;
        }
        if r == 0.0 {
            return ExtReal::Infinite;
        }
        s += n * (n / r).ln();
    }
    ExtReal::Finite(s)
}

/// Relative entropy `H(ν‖ρ) = Σ ν log(ν/ρ)`, `+∞` unless `ν ≪ ρ`.
///
/// For arguments of unequal mass the value can be negative; callers that
/// need a nonnegative functional on finite measures use [`h_c`].
pub fn relative_entropy<N: Weights, R: Weights>(nu: &N, rho: &R) -> Result<ExtReal> {
    let (nu, rho) = (nu.weight_slice(), rho.weight_slice());
    check_shape(nu.len(), rho.len())?;
    Ok(relative_entropy_slices(nu, rho))
}

/// `Cω⊗ω(a,b) = C(a,b) ω(a) ω(b)`.
pub fn kernel_product(c: &ConnectionKernel, omega: &ProbVector) -> Result<PairMeasure> {
    check_shape(c.k(), omega.len())?;
    let w = omega.weights();
    Ok(PairMeasure::from_fn(c.alphabet().clone(), |a, b| c.get(a, b) * w[a] * w[b]))
}

/// Sum of all entries. Pair measures are summed over ordered pairs, so an
/// off-diagonal unordered pair contributes twice.
pub fn total_mass<W: Weights>(m: &W) -> f64 {
    m.weight_slice().iter().sum()
}

/// `𝔥_C(ϖ‖ω) = H(ϖ‖Cω⊗ω) + ‖Cω⊗ω‖ − ‖ϖ‖`, the edge part of the joint rate.
///
/// Computed term-wise as `Σ [ϖ log(ϖ/K) − ϖ + K]`, each term of which is
/// nonnegative, so the result never drops below zero through cancellation.
pub fn h_c(varpi: &PairMeasure, omega: &ProbVector, c: &ConnectionKernel) -> Result<ExtReal> {
    check_shape(c.k(), varpi.k())?;
    let product = kernel_product(c, omega)?;
    let mut s = 0.0;
    for (&v, &kk) in varpi.table().iter().zip(product.table()) {
        if v == 0.0 {
            s += kk;
        } else if kk == 0.0 {
            return Ok(ExtReal::Infinite);
        } else {
            s += v * (v / kk).ln() - v + kk;
        }
    }
    Ok(ExtReal::Finite(s.max(0.0)))
}
