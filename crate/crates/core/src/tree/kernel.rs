use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measures::{Alphabet, PROB_SUM_TOL};

/// The ordered child types of one vertex; `[]` is the leaf configuration.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OffspringConfig(pub Vec<usize>);

impl OffspringConfig {
    pub fn leaf() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn types(&self) -> &[usize] {
        &self.0
    }

    /// `m(a, c)`: how many children of type `a`.
    pub fn multiplicity(&self, a: usize) -> usize {
        self.0.iter().filter(|&&t| t == a).count()
    }
}

impl From<Vec<usize>> for OffspringConfig {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// `Q{c | a}` for a finite alphabet of types, with a finite list of
/// configurations per type.
#[derive(Clone, Debug)]
pub struct OffspringKernel {
    alphabet: Arc<Alphabet>,
    rows: Vec<Vec<(OffspringConfig, f64)>>,
    index: Vec<HashMap<OffspringConfig, f64>>,
    n0: usize,
}

impl PartialEq for OffspringKernel {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.rows == other.rows
    }
}

impl OffspringKernel {
    /// `rows[a]` lists `(config, Q{config | a})`. Zero-probability entries are
    /// kept so that the configuration order survives a round trip.
    pub fn new(alphabet: Arc<Alphabet>, rows: Vec<Vec<(OffspringConfig, f64)>>) -> Result<Self> {
        let k = alphabet.len();
        if rows.len() != k {
            return Err(Error::ShapeMismatch { expected: k, got: rows.len() });
        }
        let mut index = Vec::with_capacity(k);
        let mut n0 = 0;
        for (a, row) in rows.iter().enumerate() {
            let mut map = HashMap::with_capacity(row.len());
            let mut total = 0.0;
            for (c, p) in row {
                if !(p.is_finite() && *p >= 0.0) {
                    return Err(Error::invalid(format!("bad probability {p} for type {a}")));
                }
                if let Some(t) = c.types().iter().find(|&&t| t >= k) {
                    return Err(Error::invalid(format!("child type {t} out of range")));
                }
                if map.insert(c.clone(), *p).is_some() {
                    return Err(Error::invalid(format!("configuration {c} listed twice for type {a}")));
                }
                total += p;
                if *p > 0.0 {
                    n0 = n0.max(c.len());
                }
            }
            if (total - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::invalid(format!(
                    "offspring law of type {} sums to {total}",
                    alphabet.symbol(a)
                )));
            }
            index.push(map);
        }
        Ok(Self { alphabet, rows, index, n0 })
    }

    /// One type, no children with probability ½, two children with
    /// probability ½: the critical binary kernel.
    pub fn binary_critical() -> Self {
        let al = Alphabet::new(["a"]).expect("valid alphabet");
        Self::new(al, vec![vec![(OffspringConfig::leaf(), 0.5), (vec![0, 0].into(), 0.5)]])
            .expect("valid kernel")
    }

    /// The two-type mutation kernel: a normal `a` dies with probability
    /// `1 − p`, splits into `(a, b)` with probability `pα` and into `(a, a)`
    /// with probability `p(1 − α)`; a mutant `b` dies with probability `1 − q`
    /// and splits into `(b, b)` with probability `q`.
    pub fn mtdna(p: f64, q: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q), ("alpha", alpha)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name} = {v} outside [0, 1]")));
            }
        }
        let al = Alphabet::new(["a", "b"])?;
        Self::new(
            al,
            vec![
                vec![
                    (OffspringConfig::leaf(), 1.0 - p),
                    (vec![0, 1].into(), p * alpha),
                    (vec![0, 0].into(), p * (1.0 - alpha)),
                ],
                vec![(OffspringConfig::leaf(), 1.0 - q), (vec![1, 1].into(), q)],
            ],
        )
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn k(&self) -> usize {
        self.alphabet.len()
    }

    /// Largest number of children with positive probability.
    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn row(&self, a: usize) -> &[(OffspringConfig, f64)] {
        &self.rows[a]
    }

    /// `Q{c | a}`, zero for unlisted configurations.
    pub fn prob(&self, a: usize, c: &OffspringConfig) -> f64 {
        self.index[a].get(c).copied().unwrap_or(0.0)
    }

    /// `A(a, b) = Σ_c Q{c | b} m(a, c)`: row = child type, column = parent.
    pub fn mean_matrix(&self) -> MeanMatrix {
        let k = self.k();
        let mut table = vec![0.0; k * k];
        for (b, row) in self.rows.iter().enumerate() {
            for (c, p) in row {
                for &a in c.types() {
                    table[a * k + b] += p;
                }
            }
        }
        MeanMatrix { k, table }
    }

    /// Text form, one `parent | children | probability` line per entry,
    /// symbols written by name.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, row) in self.rows.iter().enumerate() {
            for (c, p) in row {
                let children: Vec<&str> = c.types().iter().map(|&t| self.alphabet.symbol(t)).collect();
                let _ = writeln!(out, "{} | {} | {:?}", self.alphabet.symbol(a), children.join(" "), p);
            }
        }
        out
    }

    /// Parses the text form. Types are named by `alphabet`, or, when `None`,
    /// the alphabet is the parent symbols in order of first appearance.
    /// Blank lines and `#` comments are skipped; `-` denotes no children.
    pub fn parse(text: &str, alphabet: Option<Arc<Alphabet>>) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::parse(format!("kernel line {}: expected 3 fields", lineno + 1)));
            }
            let p: f64 = fields[2]
                .parse()
                .map_err(|_| Error::parse(format!("kernel line {}: bad probability", lineno + 1)))?;
            let children: Vec<&str> =
                if fields[1] == "-" { Vec::new() } else { fields[1].split_whitespace().collect() };
            entries.push((fields[0], children, p));
        }
        let alphabet = match alphabet {
            Some(al) => al,
            None => {
                let mut seen: Vec<&str> = Vec::new();
                for (parent, _, _) in &entries {
                    if !seen.contains(parent) {
                        seen.push(parent);
                    }
                }
                Alphabet::new(seen)?
            }
        };
        let lookup = |s: &str| {
            alphabet.index(s).ok_or_else(|| Error::parse(format!("unknown type symbol {s:?}")))
        };
        let mut rows = vec![Vec::new(); alphabet.len()];
        for (parent, children, p) in entries {
            let a = lookup(parent)?;
            let c = children.into_iter().map(lookup).collect::<Result<Vec<_>>>()?;
            rows[a].push((OffspringConfig(c), p));
        }
        Self::new(alphabet, rows)
    }
}

impl fmt::Display for OffspringConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// `A(a, b)`, the expected number of type-`a` children of a type-`b` parent.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanMatrix {
    k: usize,
    table: Vec<f64>,
}

impl MeanMatrix {
    pub fn new(k: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != k * k {
            return Err(Error::ShapeMismatch { expected: k * k, got: table.len() });
        }
        if table.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("mean matrix entries must be finite and nonnegative"));
        }
        Ok(Self { k, table })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.table[a * self.k + b]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn transpose(&self) -> MeanMatrix {
        let k = self.k;
        let mut table = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                table[b * k + a] = self.table[a * k + b];
            }
        }
        MeanMatrix { k, table }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let k = self.k;
        (0..k).map(|a| (0..k).map(|b| self.table[a * k + b] * x[b]).sum()).collect()
    }
}
