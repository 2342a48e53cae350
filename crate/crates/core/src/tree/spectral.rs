use crate::error::{Error, Result};
use crate::tree::MeanMatrix;

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 100_000;
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const CRITICAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralMethod {
    PowerIteration,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Spectral radius `ρ(A)`.
    pub rho: f64,
    /// `A π = ρ π`, normalized to sum 1.
    pub right: Vec<f64>,
    /// `πᵀ A = ρ πᵀ`, normalized to sum 1.
    pub left: Vec<f64>,
    /// `max(‖Aπ − ρπ‖∞, ‖Aᵀπ' − ρπ'‖∞)`.
    pub residual: f64,
    pub iterations: usize,
    pub method: SpectralMethod,
}

impl Spectrum {
    pub fn is_critical(&self) -> bool {
        (self.rho - 1.0).abs() < CRITICAL_TOL
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
    s
}

fn eigen_residual(a: &MeanMatrix, x: &[f64], rho: f64) -> f64 {
    a.apply(x).iter().zip(x).map(|(ax, xi)| (ax - rho * xi).abs()).fold(0.0, f64::max)
}

/// Power iteration on `A + I` from a few fixed starting vectors. The shift
/// keeps periodic matrices (e.g. `[[0,1],[1,0]]`) from oscillating.
/// Returns the eigenvector, eigenvalue and iterations used.
fn power_iteration(a: &MeanMatrix) -> Result<(Vec<f64>, f64, usize)> {
    let k = a.k();
    let starts: Vec<Vec<f64>> = vec![
        vec![1.0; k],
        (0..k).map(|i| (i + 1) as f64).collect(),
        (0..k).map(|i| (k - i) as f64 + 0.5).collect(),
    ];
    let budget = POWER_MAX_ITER / starts.len();
    let mut total = 0;
    for mut x in starts {
        normalize(&mut x);
        for _ in 0..budget {
            total += 1;
            let mut y = a.apply(&x);
            y.iter_mut().zip(&x).for_each(|(yi, xi)| *yi += xi);
            let lambda = normalize(&mut y);
            let change = y.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            x = y;
            if change < POWER_TOL {
                let rho = (lambda - 1.0).max(0.0);
                if eigen_residual(a, &x, rho) < RESIDUAL_TOL {
                    return Ok((x, rho, total));
                }
                break;
            }
        }
    }
    Err(Error::NonConvergence { iterations: total })
}

/// Largest real root of the characteristic polynomial for `k ≤ 3`.
fn perron_root_closed_form(a: &MeanMatrix) -> Result<f64> {
    let g = |i, j| a.get(i, j);
    match a.k() {
        1 => Ok(g(0, 0)),
        2 => {
            let tr = g(0, 0) + g(1, 1);
            let disc = (g(0, 0) - g(1, 1)).powi(2) + 4.0 * g(0, 1) * g(1, 0);
            Ok(0.5 * (tr + disc.max(0.0).sqrt()))
        }
        3 => {
            // λ³ − tr λ² + m λ − det
            let tr = g(0, 0) + g(1, 1) + g(2, 2);
            let m = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) + g(0, 0) * g(2, 2) - g(0, 2) * g(2, 0)
                + g(1, 1) * g(2, 2)
                - g(1, 2) * g(2, 1);
            let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
            // depressed cubic t³ + p t + q with λ = t + tr/3
            let s = tr / 3.0;
            let p = m - tr * tr / 3.0;
            let q = -2.0 * tr.powi(3) / 27.0 + tr * m / 3.0 - det;
            let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
            let t = if disc > 0.0 {
                let r = disc.sqrt();
                (-q / 2.0 + r).cbrt() + (-q / 2.0 - r).cbrt()
            } else if p == 0.0 {
                0.0
            } else {
                let r = (-p / 3.0).sqrt();
                let phi = ((-q / 2.0) / r.powi(3)).clamp(-1.0, 1.0).acos();
                2.0 * r * (phi / 3.0).cos()
            };
            Ok(t + s)
        }
        k => Err(Error::invalid(format!("closed-form spectrum only for k ≤ 3, got {k}"))),
    }
}

/// A nonnegative vector spanning the null space of `A − ρI`, `k ≤ 3`.
fn null_vector(a: &MeanMatrix, rho: f64) -> Option<Vec<f64>> {
    let k = a.k();
    let m = |i: usize, j: usize| a.get(i, j) - if i == j { rho } else { 0.0 };
    let candidates: Vec<Vec<f64>> = match k {
        1 => vec![vec![1.0]],
        2 => vec![vec![m(0, 1), -m(0, 0)], vec![m(1, 1), -m(1, 0)]],
        3 => {
            let row = |i: usize| [m(i, 0), m(i, 1), m(i, 2)];
            let cross = |u: [f64; 3], v: [f64; 3]| {
                vec![u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
            };
            vec![cross(row(0), row(1)), cross(row(0), row(2)), cross(row(1), row(2))]
        }
        _ => return None,
    };
    let scale = a.table().iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let best = candidates
        .into_iter()
        .max_by(|x, y| {
            let nx = x.iter().map(|v| v.abs()).sum::<f64>();
            let ny = y.iter().map(|v| v.abs()).sum::<f64>();
            nx.total_cmp(&ny)
        })?;
    let norm: f64 = best.iter().map(|v| v.abs()).sum();
    if norm < 1e-12 * scale * scale {
        // for k = 2 this means A = ρI, where every vector is an eigenvector
        return (k == 2).then(|| vec![0.5, 0.5]);
    }
    // fix the sign, drop rounding noise, normalize
    let sign = if best.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut x: Vec<f64> = best.iter().map(|v| (sign * v).max(0.0)).collect();
    normalize(&mut x);
    Some(x)
}

/// The dense fallback for `k ≤ 3`.
pub fn spectral_closed_form(a: &MeanMatrix) -> Result<Spectrum> {
    let rho = perron_root_closed_form(a)?.max(0.0);
    let at = a.transpose();
    let right = null_vector(a, rho).ok_or(Error::NonConvergence { iterations: 0 })?;
    let left = null_vector(&at, rho).ok_or(Error::NonConvergence { iterations: 0 })?;
    let residual = eigen_residual(a, &right, rho).max(eigen_residual(&at, &left, rho));
    Ok(Spectrum { rho, right, left, residual, iterations: 0, method: SpectralMethod::ClosedForm })
}

/// Power iteration only; reports [`Error::NonConvergence`] instead of
/// falling back.
pub fn spectral_power(a: &MeanMatrix) -> Result<Spectrum> {
    let (right, rho, it_r) = power_iteration(a)?;
    let at = a.transpose();
    let (left, _, it_l) = power_iteration(&at)?;
    let residual = eigen_residual(a, &right, rho).max(eigen_residual(&at, &left, rho));
    Ok(Spectrum { rho, right, left, residual, iterations: it_r + it_l, method: SpectralMethod::PowerIteration })
}

/// `ρ(A)` with right and left Perron vectors. Falls back to the closed form
/// for `k ≤ 3` when power iteration does not converge (e.g. a nontrivial
/// Jordan block at the top eigenvalue).
pub fn spectral(a: &MeanMatrix) -> Result<Spectrum> {
    match spectral_power(a) {
        Ok(s) => Ok(s),
        Err(Error::NonConvergence { .. }) if a.k() <= 3 => spectral_closed_form(a),
        Err(e) => Err(e),
    }
}

/// Whether every ordered pair of types (including `(a, a)`) is joined by a
/// path of positive entries of length at least one.
pub fn is_irreducible(a: &MeanMatrix) -> bool {
    let k = a.k();
    let mut reach: Vec<bool> = a.table().iter().map(|&v| v > 0.0).collect();
    for m in 0..k {
        for i in 0..k {
            if reach[i * k + m] {
                for j in 0..k {
                    if reach[m * k + j] {
                        reach[i * k + j] = true;
                    }
                }
            }
        }
    }
    reach.into_iter().all(|r| r)
}
