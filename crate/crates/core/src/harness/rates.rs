use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, RatesSection, RunSettings};
use crate::harness::runner::{grid_jobs, map_jobs};
use crate::measures::{kernel_product, Alphabet, ConnectionKernel, ExtReal, PairMeasure, ProbVector};
use crate::rates::{numeric_sup_i1, numeric_sup_i2, numeric_sup_i3, AscentParams, VariationalReport};
use crate::rng::rng_from_seed;

/// A finite rate-function instance `(ω, ϖ, μ, C)`.
#[derive(Clone, Debug)]
pub struct RateInstance {
    pub omega: ProbVector,
    pub varpi: PairMeasure,
    pub mu: ProbVector,
    pub c: ConnectionKernel,
}

fn random_law<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn random_symmetric<R: Rng + ?Sized>(k: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let mut t = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let v = rng.random_range(lo..hi);
            t[a * k + b] = v;
            t[b * k + a] = v;
        }
    }
    t
}

/// Strictly positive `ω`, `μ`, symmetric `C` and `ϖ`; every rate is finite
/// except `I₂` (which needs `ϖ = Cω⊗ω`) and `I₃` (which needs `ω = μ`).
pub fn random_instance<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<RateInstance> {
    let al = Alphabet::indexed(k)?;
    Ok(RateInstance {
        omega: ProbVector::new(al.clone(), random_law(k, rng))?,
        mu: ProbVector::new(al.clone(), random_law(k, rng))?,
        c: ConnectionKernel::new(al.clone(), random_symmetric(k, 0.1, 3.0, rng))?,
        varpi: PairMeasure::from_table(al, random_symmetric(k, 0.01, 1.0, rng))?,
    })
}

/// An instance whose `I₁` supremum is infinite: `C` vanishes on a pair that
/// `ϖ` charges.
pub fn infeasible_i1<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<RateInstance> {
    let mut inst = random_instance(k, rng)?;
    let mut table = inst.c.table().to_vec();
    let (a, b) = (0, rng.random_range(0..k));
    table[a * k + b] = 0.0;
    table[b * k + a] = 0.0;
    inst.c = ConnectionKernel::new(inst.c.alphabet().clone(), table)?;
    Ok(inst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    pub instance_id: usize,
    pub objective: &'static str,
    pub report: VariationalReport,
    /// Whether the instance was built to have an infinite supremum.
    pub expect_divergent: bool,
}

fn ext(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(x) => x.to_string(),
        ExtReal::Infinite => "inf".into(),
    }
}

/// Runs the certification suite: per instance `I₁` against `½𝔥_C`, `I₂` at
/// `ϖ = Cω⊗ω` against `H(ω‖μ)`, `I₃` at `ω = μ` against `½𝔥_C`, then the
/// constructed divergent instances.
pub fn run_rates(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Vec<RateRow>> {
    let section = cfg.rates.clone().unwrap_or_default();
    if section.k.is_empty() || section.k.iter().any(|&k| k < 1) {
        return Err(Error::Config("rates.k must list alphabet sizes ≥ 1".into()));
    }
    rate_rows(&section, s)
}

fn rate_rows(section: &RatesSection, s: &RunSettings) -> Result<Vec<RateRow>> {
    let params = AscentParams::default();
    let total = section.instances + section.infeasible;
    let jobs = grid_jobs(&[0], total as u64, s.seed);
    let rows = map_jobs(&jobs, s.workers, |job| -> Result<Vec<RateRow>> {
        let id = job.replicate as usize;
        let k = section.k[id % section.k.len()];
        let mut rng = rng_from_seed(job.seed);
        let row = |objective, report, expect_divergent| RateRow { instance_id: id, objective, report, expect_divergent };
        if id < section.instances {
            let inst = random_instance(k, &mut rng)?;
            let typical = kernel_product(&inst.c, &inst.omega)?;
            Ok(vec![
                row("i1", numeric_sup_i1(&inst.omega, &inst.varpi, &inst.mu, &inst.c, &params)?, false),
                row("i2", numeric_sup_i2(&inst.omega, &typical, &inst.mu, &inst.c, &params)?, false),
                row("i3", numeric_sup_i3(&inst.mu, &inst.varpi, &inst.mu, &inst.c, &params)?, false),
            ])
        } else {
            let inst = infeasible_i1(k.max(2), &mut rng)?;
            Ok(vec![
                row("i1", numeric_sup_i1(&inst.omega, &inst.varpi, &inst.mu, &inst.c, &params)?, true),
                row("i2", numeric_sup_i2(&inst.omega, &inst.varpi, &inst.mu, &inst.c, &params)?, true),
                row("i3", numeric_sup_i3(&inst.omega, &inst.varpi, &inst.mu, &inst.c, &params)?, true),
            ])
        }
    })?;
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

pub const RATES_HEADER: &str = "instance_id,objective,closed_form,numeric_sup,gap,converged,divergent,expected_divergent";

pub fn write_rates<W: Write>(mut w: W, rows: &[RateRow], seed: u64) -> Result<()> {
    writeln!(w, "# seed={seed}; values in nats; gap = |closed_form - numeric_sup| (0 when both are inf)")?;
    writeln!(w, "# i1: sup over g vs I1 = 1/2 h_C; i2: at varpi = C omega x omega vs H(omega|mu); i3: at omega = mu vs 1/2 h_C")?;
    writeln!(w, "{RATES_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.instance_id,
            r.objective,
            ext(r.report.closed_form),
            ext(r.report.numeric_sup),
            r.report.gap,
            r.report.converged,
            r.report.divergence.is_some(),
            r.expect_divergent
        )?;
    }
    Ok(())
}
