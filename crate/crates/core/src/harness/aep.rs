use std::f64::consts::LN_2;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{empirical_colour, empirical_pair, expected_information, log_prob_graph, sample_graph, InfoMode};
use crate::harness::config::{as_config, ExperimentConfig, Mode, RunSettings};
use crate::harness::records::ExperimentRecord;
use crate::harness::runner::{grid_jobs, map_jobs, Job};
use crate::measures::{kernel_product, ProbVector};
use crate::rates::graph_aep_entropy;
use crate::rng::rng_from_seed;
use crate::tree::{
    log_prob_tree, log_prob_tree_conditioned, offspring_measure, progeny_distribution, sample_tree_window,
    spectral, tree_aep_entropy, OffspringKernel, OffspringMeasure,
};

/// Rows plus the comment block describing them.
#[derive(Clone, Debug)]
pub struct Table {
    pub comment: String,
    pub records: Vec<ExperimentRecord>,
    /// Statistic whose per-`n` mean goes to the plot file.
    pub plot_statistic: &'static str,
}

/// How far past a requested size to look for one of positive probability.
pub const SIZE_SEARCH: usize = 64;

pub fn run_aep(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Table> {
    match cfg.mode()? {
        Mode::Tree => tree_aep(cfg, s),
        m => graph_aep(cfg, s, m),
    }
}

fn collect(rows: Vec<Result<Vec<ExperimentRecord>>>) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

fn graph_aep(cfg: &ExperimentConfig, s: &RunSettings, mode: Mode) -> Result<Table> {
    let model = cfg.graph_model()?;
    let info = if mode == Mode::GraphSparse { InfoMode::SparseThm } else { InfoMode::CriticalThm };
    let grid = &cfg.experiment.n;
    if let Some(&n) = grid.iter().find(|&&n| n < 2) {
        return Err(Error::Config(format!("graph experiments need n ≥ 2, got {n}")));
    }
    let laws = grid.iter().map(|&n| model.law(n)).collect::<Result<Vec<_>>>().map_err(as_config)?;
    let limit_bits = graph_aep_entropy(model.colour_law(), model.kernel(), info)?;
    let l2_target = kernel_product(model.kernel(), model.colour_law())?;
    let alphabet = model.colour_law().alphabet().clone();
    let expected: Vec<f64> = laws.iter().map(|l| expected_information(l, info)).collect();
    let mode_name = mode.as_str();

    let jobs = grid_jobs(grid, cfg.experiment.replicates, s.seed);
    let rows = map_jobs(&jobs, s.workers, |job: &Job| -> Result<Vec<ExperimentRecord>> {
        let start = Instant::now();
        let i = grid.iter().position(|&n| n == job.n).unwrap();
        let law = &laws[i];
        let x = sample_graph(law, &mut rng_from_seed(job.seed));
        let nats = -log_prob_graph(&x, law)? / info.normalizer(law.n(), law.a_n());
        let l1 = empirical_colour(&x, &alphabet)?.sup_distance(model.colour_law());
        let l2 = empirical_pair(&x, law.a_n(), &alphabet)?.sup_distance(&l2_target);
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let row = |statistic, value, target| ExperimentRecord {
            n: job.n,
            replicate: job.replicate,
            seed: job.seed,
            statistic,
            value,
            target,
            mode: mode_name,
            wall_ms,
        };
        Ok(vec![
            row("information", nats, expected[i]),
            row("information_bits", nats / LN_2, limit_bits),
            row("l1_sup", l1, 0.0),
            row("l2_sup", l2, 0.0),
        ])
    })?;
    let norm = match info {
        InfoMode::SparseThm => "a_n n^2 ln n",
        InfoMode::CriticalThm => "n",
    };
    let comment = format!(
        "mode={mode_name} family={} seed={} replicates={}\n\
         information: -ln P_n(X) / ({norm}) in nats; target: its exact expectation under the finite-n law\n\
         information_bits: the same in bits; target: limiting entropy constant H in bits\n\
         l1_sup: max_a |L1(a) - mu(a)|; l2_sup: max_ab |L2(a,b) - mu(a)C(a,b)mu(b)| with L2 normalized by n^2 a_n",
        model.family(),
        s.seed,
        cfg.experiment.replicates
    );
    Ok(Table { comment, records: collect(rows)?, plot_statistic: "information" })
}

/// The tree setup shared by the `aep`, `codec` and `sample` commands.
pub(crate) struct TreeSetup {
    pub root: ProbVector,
    pub kernel: OffspringKernel,
    /// Normalized right Perron vector of the mean matrix.
    pub pi: Vec<f64>,
    pub entropy_bits: f64,
    /// `P{|T| = s}` up to the largest size any job can produce.
    pub progeny: Vec<f64>,
    /// Requested sizes moved to the nearest feasible size at or above them.
    pub grid: Vec<usize>,
    pub window: usize,
    pub max_attempts: u64,
}

pub(crate) fn tree_setup(cfg: &ExperimentConfig) -> Result<TreeSetup> {
    let (root, kernel) = cfg.tree_model()?;
    let section = cfg.tree_section()?;
    let spec = spectral(&kernel.mean_matrix())?;
    let total: f64 = spec.right.iter().sum();
    let pi: Vec<f64> = spec.right.iter().map(|v| v / total).collect();
    let entropy_bits = tree_aep_entropy(&pi, &kernel)? / LN_2;
    let window = section.window;
    let n_max = cfg.experiment.n.iter().copied().max().unwrap_or(1) + SIZE_SEARCH + window;
    let progeny = progeny_distribution(&root, &kernel, n_max)?;
    let mut grid = Vec::new();
    for &n in &cfg.experiment.n {
        let reach = if window > 0 { window } else { SIZE_SEARCH };
        let feasible = (n.max(1)..=n + reach).find(|&m| progeny[m] > 0.0);
        match feasible {
            Some(_) if window > 0 => grid.push(n),
            Some(m) => grid.push(m),
            None => return Err(Error::Config(format!("no tree size near {n} has positive probability"))),
        }
    }
    grid.dedup();
    Ok(TreeSetup { root, kernel, pi, entropy_bits, progeny, grid, window, max_attempts: section.max_attempts })
}

fn tree_aep(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Table> {
    let t = tree_setup(cfg)?;
    let target = OffspringMeasure::product(&t.pi, &t.kernel)?;
    let mode_name = if t.window > 0 { "tree_window" } else { "tree" };
    let jobs = grid_jobs(&t.grid, cfg.experiment.replicates, s.seed);
    let rows = map_jobs(&jobs, s.workers, |job: &Job| -> Result<Vec<ExperimentRecord>> {
        let start = Instant::now();
        let mut rng = rng_from_seed(job.seed);
        let drawn = sample_tree_window(job.n, t.window, &t.root, &t.kernel, t.max_attempts, &mut rng);
        let row = |statistic, value, target| ExperimentRecord {
            n: job.n,
            replicate: job.replicate,
            seed: job.seed,
            statistic,
            value,
            target,
            mode: mode_name,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        let sample = match drawn {
            Ok(sample) => sample,
            Err(Error::AttemptsExhausted { attempts }) => {
                return Ok(vec![row("attempts_exhausted", attempts as f64, f64::NAN)]);
            }
            Err(e) => return Err(e),
        };
        let tree = &sample.tree;
        let size = tree.size() as f64;
        let p_size = t.progeny[tree.size()];
        let conditioned = -log_prob_tree_conditioned(tree, &t.root, &t.kernel, p_size)? / (size * LN_2);
        let unconditioned = -log_prob_tree(tree, &t.root, &t.kernel)? / (size * LN_2);
        let sup = offspring_measure(tree).sup_distance(&target);
        Ok(vec![
            row("information_bits", conditioned, t.entropy_bits),
            row("unconditioned_bits", unconditioned, t.entropy_bits),
            row("size_correction_bits", -p_size.log2() / size, 0.0),
            row("offspring_sup", sup, 0.0),
            row("attempts", sample.attempts as f64, f64::NAN),
        ])
    })?;
    let comment = format!(
        "mode={mode_name} seed={} replicates={} window={}\n\
         information_bits: -log2 P_n(T) / |T| under the law conditioned on |T|; target: tree entropy H in bits at the right Perron vector pi\n\
         unconditioned_bits: -log2 P(T) / |T|; size_correction_bits: log2(1/P{{|T| = n}}) / |T|, so information_bits = unconditioned_bits - size_correction_bits\n\
         offspring_sup: max |M_X - pi x Q|; attempts: rejection-sampling draws used",
        s.seed,
        cfg.experiment.replicates,
        t.window
    );
    Ok(Table { comment, records: collect(rows)?, plot_statistic: "information_bits" })
}
