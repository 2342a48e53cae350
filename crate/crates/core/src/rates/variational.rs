//! Numerical suprema of the variational objectives whose closed forms are
//! the rate functions `I₁`, `I₂` and `I₃`.
//!
//! Each objective is concave. A ray probe from the origin first looks for a
//! coordinate direction along which the slope stays above `ε` for 100
//! doublings; such a direction means the supremum is `+∞`. Otherwise the
//! objective is maximized by gradient ascent with Barzilai–Borwein steps and
//! Armijo backtracking.

use crate::error::{Error, Result};
use crate::measures::{kernel_product, ConnectionKernel, ExtReal, PairMeasure, ProbVector};
use crate::numerics::log_sum_exp_weighted;
use crate::rates::{rate_i1, rate_i2, rate_i3};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AscentParams {
    pub max_iter: usize,
    /// Stop when the gradient sup-norm falls below this.
    pub grad_tol: f64,
    /// Slope threshold for the divergence probe.
    pub slope_eps: f64,
    /// Number of ray doublings in the divergence probe.
    pub doublings: u32,
}

impl Default for AscentParams {
    fn default() -> Self {
        Self { max_iter: 10_000, grad_tol: 1e-10, slope_eps: 1e-9, doublings: 100 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalReport {
    pub closed_form: ExtReal,
    pub numeric_sup: ExtReal,
    /// `|closed_form − numeric_sup|`; zero when both are infinite and
    /// infinite when exactly one is.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Description of the unbounded direction, when one was found.
    pub divergence: Option<String>,
}

fn gap(a: ExtReal, b: ExtReal) -> f64 {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => (x - y).abs(),
        (ExtReal::Infinite, ExtReal::Infinite) => 0.0,
        _ => f64::INFINITY,
    }
}

/// Index map for the `k(k+1)/2` free coordinates of a symmetric table.
#[derive(Clone, Debug)]
pub struct SymCoords {
    pairs: Vec<(usize, usize)>,
}

impl SymCoords {
    pub fn new(k: usize) -> Self {
        Self { pairs: (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, i: usize) -> (usize, usize) {
        self.pairs[i]
    }

    /// Multiplicity of a coordinate in a sum over ordered pairs.
    pub fn weight(&self, i: usize) -> f64 {
        let (a, b) = self.pairs[i];
        if a == b {
            1.0
        } else {
            2.0
        }
    }

    pub fn gather(&self, m: &PairMeasure) -> Vec<f64> {
        self.pairs.iter().map(|&(a, b)| m.get(a, b)).collect()
    }
}

/// `e^g K`, with the convention `e^g · 0 = 0` even when `e^g` overflows.
fn exp_times(g: f64, k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        g.exp() * k
    }
}

/// The edge part `Σ_{a,b} [½ g ϖ + ½ (1 − e^g) K]` over ordered pairs, with
/// its gradient in the symmetric coordinates.
fn edge_part(g: &[f64], varpi: &[f64], kk: &[f64], coords: &SymCoords) -> (f64, Vec<f64>) {
    let mut v = 0.0;
    let mut grad = vec![0.0; g.len()];
    for i in 0..g.len() {
        let w = coords.weight(i);
        let e = exp_times(g[i], kk[i]);
        let gv = if varpi[i] == 0.0 { 0.0 } else { g[i] * varpi[i] };
        v += w * 0.5 * (gv + kk[i] - e);
        grad[i] = w * 0.5 * (varpi[i] - e);
    }
    (v, grad)
}

/// `½⟨g, ϖ⟩ + ½⟨1 − e^g, Cω⊗ω⟩`; `g` in symmetric coordinates.
pub fn objective_i1(g: &[f64], varpi: &PairMeasure, omega: &ProbVector, c: &ConnectionKernel) -> Result<f64> {
    let coords = SymCoords::new(c.k());
    check_len(g.len(), coords.len())?;
    let kk = coords.gather(&kernel_product(c, omega)?);
    Ok(edge_part(g, &coords.gather(varpi), &kk, &coords).0)
}

/// `⟨f − U_f, ω⟩ + ½⟨g, ϖ − Cω⊗ω⟩` with `U_f = log Σ e^f μ`.
pub fn objective_i2(
    f: &[f64],
    g: &[f64],
    omega: &ProbVector,
    varpi: &PairMeasure,
    mu: &ProbVector,
    c: &ConnectionKernel,
) -> Result<f64> {
    let coords = SymCoords::new(c.k());
    check_len(f.len(), c.k())?;
    check_len(g.len(), coords.len())?;
    let p = I2Problem::new(omega, varpi, mu, c)?;
    let x: Vec<f64> = f.iter().chain(g).copied().collect();
    Ok(p.eval(&x).0)
}

/// `Z_n(f) = (n a_n)⁻¹ log Σ_a e^{n a_n f(a)} μ(a)`; tends to `⟨f, μ⟩` as
/// `n a_n → 0`.
pub fn z_n(f: &[f64], mu: &ProbVector, n_a_n: f64) -> f64 {
    let scaled: Vec<f64> = f.iter().map(|v| v * n_a_n).collect();
    log_sum_exp_weighted(&scaled, mu.weights()) / n_a_n
}

/// `Z(f) = lim Z_n(f) = ⟨f, μ⟩`.
pub fn z_limit(f: &[f64], mu: &ProbVector) -> f64 {
    f.iter().zip(mu.weights()).map(|(a, b)| a * b).sum()
}

/// `⟨f − Z(f), ω⟩ + ½⟨g, ϖ⟩ + ½⟨1 − e^g, Cω⊗ω⟩`.
pub fn objective_i3(
    f: &[f64],
    g: &[f64],
    omega: &ProbVector,
    varpi: &PairMeasure,
    mu: &ProbVector,
    c: &ConnectionKernel,
) -> Result<f64> {
    check_len(f.len(), c.k())?;
    let z = z_limit(f, mu);
    let colour: f64 = f.iter().zip(omega.weights()).map(|(fa, w)| (fa - z) * w).sum();
    Ok(colour + objective_i1(g, varpi, omega, c)?)
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::ShapeMismatch { expected, got });
    }
    Ok(())
}

/// Smooth concave objective with analytic gradient.
trait Concave {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> (f64, Vec<f64>);
    fn coordinate_name(&self, i: usize) -> String;
}

/// Looks for a coordinate ray `±t e_i` along which the directional slope
/// exceeds `eps` at every `t = 2^j`, `j = 0..=doublings`.
fn probe_divergence<P: Concave>(p: &P, params: &AscentParams) -> Option<String> {
    let dim = p.dim();
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            let mut x = vec![0.0; dim];
            let unbounded = (0..=params.doublings).all(|j| {
                x[i] = sign * 2f64.powi(j as i32);
                let slope = sign * p.eval(&x).1[i];
                slope > params.slope_eps
            });
            if unbounded {
                let slope = sign * p.eval(&vec![0.0; dim]).1[i];
                return Some(format!(
                    "objective increases without bound along {}{} (slope {slope:.3e} > {:e} for {} doublings)",
                    if sign > 0.0 { "+" } else { "−" },
                    p.coordinate_name(i),
                    params.slope_eps,
                    params.doublings
                ));
            }
        }
    }
    None
}

struct Ascent {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Gradient ascent from the origin over the coordinates marked `free`.
fn ascend<P: Concave>(p: &P, free: &[bool], params: &AscentParams) -> Ascent {
    let dim = p.dim();
    let mask = |mut g: Vec<f64>| {
        g.iter_mut().zip(free).for_each(|(gi, &f)| {
            if !f {
                *gi = 0.0
            }
        });
        g
    };
    let mut x = vec![0.0; dim];
    let (mut value, g0) = p.eval(&x);
    let mut grad = mask(g0);
    let mut step = 1.0;
    let mut iterations = 0;
    while iterations < params.max_iter {
        let gnorm = sup_norm(&grad);
        if gnorm < params.grad_tol {
            return Ascent { x, value, iterations, converged: true };
        }
        iterations += 1;
        let g2: f64 = grad.iter().map(|v| v * v).sum();
        let mut s = step;
        let mut accepted = None;
        for _ in 0..80 {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi + s * gi).collect();
            let (v, g) = p.eval(&trial);
            let g = mask(g);
            if v.is_finite() && g.iter().all(|t| t.is_finite()) {
                let sufficient = v >= value + 1e-4 * s * g2;
                // near the optimum the value stops resolving; accept steps
                // that do not lose value beyond rounding and shrink the gradient
                let flat = (v - value).abs() <= 8.0 * f64::EPSILON * (1.0 + value.abs()) && sup_norm(&g) < gnorm;
                if sufficient || flat {
                    accepted = Some((trial, v, g, s));
                    break;
                }
            }
            s *= 0.5;
        }
        let Some((x_new, v_new, g_new, s_used)) = accepted else {
            break;
        };
        // Barzilai–Borwein step for the next iteration
        let sx: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let sy: Vec<f64> = g_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let num: f64 = sx.iter().map(|v| v * v).sum();
        let den: f64 = -sx.iter().zip(&sy).map(|(a, b)| a * b).sum::<f64>();
        step = if den > 0.0 && num > 0.0 { (num / den).clamp(1e-10, 1e10) } else { (2.0 * s_used).min(1e10) };
        x = x_new;
        value = v_new;
        grad = g_new;
    }
    let converged = sup_norm(&grad) < params.grad_tol;
    Ascent { x, value, iterations, converged }
}

struct I1Problem {
    coords: SymCoords,
    varpi: Vec<f64>,
    kk: Vec<f64>,
}

impl Concave for I1Problem {
    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        edge_part(x, &self.varpi, &self.kk, &self.coords)
    }

    fn coordinate_name(&self, i: usize) -> String {
        let (a, b) = self.coords.pair(i);
        format!("g({a},{b})")
    }
}

/// Coordinates `f(0..k)` followed by the symmetric `g` coordinates.
struct I2Problem {
    k: usize,
    coords: SymCoords,
    omega: Vec<f64>,
    mu: Vec<f64>,
    /// `ϖ − Cω⊗ω` in symmetric coordinates
    slope: Vec<f64>,
}

impl I2Problem {
    fn new(omega: &ProbVector, varpi: &PairMeasure, mu: &ProbVector, c: &ConnectionKernel) -> Result<Self> {
        let k = c.k();
        let coords = SymCoords::new(k);
        let kk = coords.gather(&kernel_product(c, omega)?);
        let slope = coords.gather(varpi).iter().zip(&kk).map(|(v, q)| v - q).collect();
        Ok(Self { k, coords, omega: omega.weights().to_vec(), mu: mu.weights().to_vec(), slope })
    }
}

impl Concave for I2Problem {
    fn dim(&self) -> usize {
        self.k + self.coords.len()
    }

    fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let (f, g) = x.split_at(self.k);
        let u = log_sum_exp_weighted(f, &self.mu);
        let mut v: f64 = f.iter().zip(&self.omega).map(|(fa, w)| if *w == 0.0 { 0.0 } else { (fa - u) * w }).sum();
        let mut grad = Vec::with_capacity(self.dim());
        // ∂/∂f(a) = ω(a) − μ(a) e^{f(a) − U_f}
        grad.extend((0..self.k).map(|a| {
            let tilted = if self.mu[a] == 0.0 { 0.0 } else { self.mu[a] * (f[a] - u).exp() };
            self.omega[a] - tilted
        }));
        for (i, gi) in g.iter().enumerate() {
            let w = self.coords.weight(i);
            v += w * 0.5 * gi * self.slope[i];
            grad.push(w * 0.5 * self.slope[i]);
        }
        (v, grad)
    }

    fn coordinate_name(&self, i: usize) -> String {
        if i < self.k {
            format!("f({i})")
        } else {
            let (a, b) = self.coords.pair(i - self.k);
            format!("g({a},{b})")
        }
    }
}

/// Coordinates `f(0..k)` followed by the symmetric `g` coordinates.
struct I3Problem {
    k: usize,
    /// `ω − μ`, the constant slope of the colour part
    drift: Vec<f64>,
    edges: I1Problem,
}

impl Concave for I3Problem {
    fn dim(&self) -> usize {
        self.k + self.edges.dim()
    }

    fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let (f, g) = x.split_at(self.k);
        let (ve, ge) = self.edges.eval(g);
        let vf: f64 = f.iter().zip(&self.drift).map(|(a, b)| a * b).sum();
        let mut grad = self.drift.clone();
        grad.extend(ge);
        (vf + ve, grad)
    }

    fn coordinate_name(&self, i: usize) -> String {
        if i < self.k {
            format!("f({i})")
        } else {
            self.edges.coordinate_name(i - self.k)
        }
    }
}

fn report<P: Concave>(p: &P, closed_form: ExtReal, free: &[bool], params: &AscentParams) -> VariationalReport {
    if let Some(why) = probe_divergence(p, params) {
        return VariationalReport {
            closed_form,
            numeric_sup: ExtReal::Infinite,
            gap: gap(closed_form, ExtReal::Infinite),
            iterations: 0,
            converged: true,
            divergence: Some(why),
        };
    }
    let run = ascend(p, free, params);
    debug_assert_eq!(run.x.len(), p.dim());
    let numeric = ExtReal::Finite(run.value.max(0.0));
    VariationalReport {
        closed_form,
        numeric_sup: numeric,
        gap: gap(closed_form, numeric),
        iterations: run.iterations,
        converged: run.converged,
        divergence: None,
    }
}

fn check_shapes(omega: &ProbVector, varpi: &PairMeasure, mu: &ProbVector, c: &ConnectionKernel) -> Result<()> {
    for got in [omega.len(), varpi.k(), mu.len()] {
        check_len(got, c.k())?;
    }
    Ok(())
}

/// Supremum over symmetric `g` of `½⟨g, ϖ⟩ + ½⟨1 − e^g, Cω⊗ω⟩`, certified
/// against `½ 𝔥_C(ϖ‖ω)` (maximizer `g* = log(ϖ / Cω⊗ω)`).
pub fn numeric_sup_i1(
    omega: &ProbVector,
    varpi: &PairMeasure,
    mu: &ProbVector,
    c: &ConnectionKernel,
    params: &AscentParams,
) -> Result<VariationalReport> {
    check_shapes(omega, varpi, mu, c)?;
    let coords = SymCoords::new(c.k());
    let kk = coords.gather(&kernel_product(c, omega)?);
    let problem = I1Problem { varpi: coords.gather(varpi), kk, coords };
    let closed = rate_i1(omega, varpi, mu, c)?.value;
    let free = vec![true; problem.dim()];
    Ok(report(&problem, closed, &free, params))
}

/// Supremum over `(f, g)` of `⟨f − U_f, ω⟩ + ½⟨g, ϖ − Cω⊗ω⟩`, certified
/// against `I₂`. When `ϖ = Cω⊗ω` the `g` part is flat and the `f` part is
/// the Donsker–Varadhan form with maximizer `f* = log(ω/μ)`.
pub fn numeric_sup_i2(
    omega: &ProbVector,
    varpi: &PairMeasure,
    mu: &ProbVector,
    c: &ConnectionKernel,
    params: &AscentParams,
) -> Result<VariationalReport> {
    check_shapes(omega, varpi, mu, c)?;
    let problem = I2Problem::new(omega, varpi, mu, c)?;
    let closed = rate_i2(omega, varpi, mu, c)?.value;
    // g coordinates with slope below ε are flat: leave them at 0
    let free: Vec<bool> = (0..problem.dim())
        .map(|i| i < problem.k || problem.slope[i - problem.k].abs() > params.slope_eps)
        .collect();
    Ok(report(&problem, closed, &free, params))
}

/// Supremum over `(f, g)` of `⟨f − Z(f), ω⟩ + ½⟨g, ϖ⟩ + ½⟨1 − e^g, Cω⊗ω⟩`
/// with `Z(f) = ⟨f, μ⟩`, certified against `I₃`. The colour part is linear
/// with slope `ω − μ`, so it is unbounded unless `ω = μ`.
pub fn numeric_sup_i3(
    omega: &ProbVector,
    varpi: &PairMeasure,
    mu: &ProbVector,
    c: &ConnectionKernel,
    params: &AscentParams,
) -> Result<VariationalReport> {
    check_shapes(omega, varpi, mu, c)?;
    let k = c.k();
    let coords = SymCoords::new(k);
    let kk = coords.gather(&kernel_product(c, omega)?);
    let drift: Vec<f64> = omega.weights().iter().zip(mu.weights()).map(|(w, m)| w - m).collect();
    let problem = I3Problem { k, drift, edges: I1Problem { varpi: coords.gather(varpi), kk, coords } };
    let closed = rate_i3(omega, varpi, mu, c)?.value;
    let free: Vec<bool> = (0..problem.dim())
        .map(|i| i >= k || problem.drift[i].abs() > params.slope_eps)
        .collect();
    Ok(report(&problem, closed, &free, params))
}
