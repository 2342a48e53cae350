use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The sequence `a_n` setting the edge density, `p_n ≈ a_n · C`.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalingFamily {
    /// `a_n = 1/n`.
    Sparse,
    /// `a_n = 1/(n ln n)`, the regime where colours and edges cost the same
    /// order of bits.
    InvNLogN,
    /// `a_n = ln n / n`, satisfies `a_n n ln n → ∞` and `ln a_n / ln n → −1`.
    LogNOverN,
    /// `a_n = n^{−θ}`.
    Power(f64),
    /// Explicit values for selected `n`.
    Custom(BTreeMap<u64, f64>),
}

impl ScalingFamily {
    /// Evaluates `a_n`. The logarithmic presets have no meaningful value at
    /// `n = 1` (a single vertex has no pairs); `1.0` is returned there.
    pub fn a_n(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("a_n is undefined for n = 0"));
        }
        let nf = n as f64;
        let v = match self {
            ScalingFamily::Sparse => 1.0 / nf,
            ScalingFamily::InvNLogN if n < 2 => 1.0,
            ScalingFamily::InvNLogN => 1.0 / (nf * nf.ln()),
            ScalingFamily::LogNOverN if n < 2 => 1.0,
            ScalingFamily::LogNOverN => nf.ln() / nf,
            ScalingFamily::Power(theta) => nf.powf(-theta),
            ScalingFamily::Custom(table) => *table
                .get(&n)
                .ok_or_else(|| Error::invalid(format!("custom scaling has no entry for n = {n}")))?,
        };
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::invalid(format!("a_n must be positive and finite, got {v} at n = {n}")))
        }
    }
}

impl fmt::Display for ScalingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalingFamily::Sparse => f.write_str("sparse"),
            ScalingFamily::InvNLogN => f.write_str("inv_n_log_n"),
            ScalingFamily::LogNOverN => f.write_str("log_n_over_n"),
            ScalingFamily::Power(theta) => write!(f, "power:{theta}"),
            ScalingFamily::Custom(table) => {
                f.write_str("custom:")?;
                let parts: Vec<String> = table.iter().map(|(n, a)| format!("{n}={a}")).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for ScalingFamily {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `power:0.5` or
    /// `custom:10=0.1,20=0.05`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "sparse" => return Ok(ScalingFamily::Sparse),
            "inv_n_log_n" => return Ok(ScalingFamily::InvNLogN),
            "log_n_over_n" => return Ok(ScalingFamily::LogNOverN),
            _ => {}
        }
        if let Some(theta) = s.strip_prefix("power:") {
            let theta: f64 = theta.parse().map_err(|_| Error::parse(format!("bad exponent in {s:?}")))?;
            if !(theta > 0.0) {
                return Err(Error::parse("power exponent must be positive"));
            }
            return Ok(ScalingFamily::Power(theta));
        }
        if let Some(rest) = s.strip_prefix("custom:") {
            let mut table = BTreeMap::new();
            for part in rest.split(',').filter(|p| !p.is_empty()) {
                let (n, a) = part
                    .split_once('=')
                    .ok_or_else(|| Error::parse(format!("bad custom entry {part:?}")))?;
                let n: u64 = n.trim().parse().map_err(|_| Error::parse(format!("bad n in {part:?}")))?;
                let a: f64 = a.trim().parse().map_err(|_| Error::parse(format!("bad a_n in {part:?}")))?;
                if !(a > 0.0) {
                    return Err(Error::parse("custom a_n must be positive"));
                }
                table.insert(n, a);
            }
            return Ok(ScalingFamily::Custom(table));
        }
        Err(Error::parse(format!("unknown scaling family {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_limits() {
        for n in [10u64, 1000, 100_000] {
            let nf = n as f64;
            assert!((ScalingFamily::Sparse.a_n(n).unwrap() * nf - 1.0).abs() < 1e-15);
        }
        // n·a_n → 0 for inv_n_log_n
        let small: Vec<f64> = [1e2, 1e4, 1e6]
            .iter()
            .map(|&n| ScalingFamily::InvNLogN.a_n(n as u64).unwrap() * n)
            .collect();
        assert!(small.windows(2).all(|w| w[1] < w[0]));
        // log_n_over_n: a_n n ln n → ∞ and ln a_n / ln n → −1
        let fam = ScalingFamily::LogNOverN;
        let mut prev = 0.0;
        for n in [1e2, 1e4, 1e6, 1e8] {
            let a = fam.a_n(n as u64).unwrap();
            let growth = a * n * n.ln();
            assert!(growth > prev);
            prev = growth;
        }
        let a = fam.a_n(100_000_000).unwrap();
        assert!((a.ln() / (1e8f64).ln() + 1.0).abs() < 0.2);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["sparse", "inv_n_log_n", "log_n_over_n", "power:0.5", "custom:10=0.1,20=0.05"] {
            let fam: ScalingFamily = s.parse().unwrap();
            assert_eq!(fam.to_string(), s);
        }
        assert!("power:-1".parse::<ScalingFamily>().is_err());
        assert!("dense".parse::<ScalingFamily>().is_err());
    }

    #[test]
    fn custom_requires_entry() {
        let fam: ScalingFamily = "custom:10=0.1".parse().unwrap();
        assert_eq!(fam.a_n(10).unwrap(), 0.1);
        assert!(fam.a_n(11).is_err());
    }
}
