use crate::error::{Error, Result};
use crate::measures::ProbVector;
use crate::tree::OffspringKernel;

/// `P{|T| = s}` for `s = 0..=n_max` (entry 0 is always zero), with the root
/// type drawn from `mu`.
///
/// With `f_a(s)` the size law of a tree rooted at type `a`,
/// `f_a(s) = Σ_c Q{c|a} (f_{c₁} * … * f_{c_m})(s − 1)`. The forest
/// convolutions are kept as running partial products per configuration and
/// extended by one size at a time, so the whole table costs
/// `O(n_max² · Σ_c |c|)`.
pub fn progeny_distribution(mu: &ProbVector, kernel: &OffspringKernel, n_max: usize) -> Result<Vec<f64>> {
    let k = kernel.k();
    if mu.len() != k {
        return Err(Error::ShapeMismatch { expected: k, got: mu.len() });
    }
    // f[a][s]
    let mut f = vec![vec![0.0; n_max + 1]; k];
    // partial[a][i][j][s]: size law of the forest of the first j children
    // of configuration i of type a; partial[..][0] is δ₀
    let mut partial: Vec<Vec<Vec<Vec<f64>>>> = (0..k)
        .map(|a| {
            kernel
                .row(a)
                .iter()
                .map(|(c, _)| {
                    let mut levels = vec![vec![0.0; n_max + 1]; c.len() + 1];
                    levels[0][0] = 1.0;
                    levels
                })
                .collect()
        })
        .collect();

    for s in 1..=n_max {
        // forests of total size s − 1 need f up to s − 1, already known
        let t = s - 1;
        for a in 0..k {
            for (i, (c, _)) in kernel.row(a).iter().enumerate() {
                let levels = &mut partial[a][i];
                for j in 1..=c.len() {
                    let child = c.types()[j - 1];
                    let mut acc = 0.0;
                    for u in 1..=t {
                        acc += levels[j - 1][t - u] * f[child][u];
                    }
                    levels[j][t] = acc;
                }
            }
        }
        for a in 0..k {
            let mut acc = 0.0;
            for (i, (c, p)) in kernel.row(a).iter().enumerate() {
                acc += p * partial[a][i][c.len()][t];
            }
            f[a][s] = acc;
        }
    }

    let w = mu.weights();
    Ok((0..=n_max).map(|s| (0..k).map(|a| w[a] * f[a][s]).sum()).collect())
}
