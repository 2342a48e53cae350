use std::f64::consts::LN_2;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::codec::{fnv1a64, write_container, BitString, GraphCoder, TreeCoder};
use crate::error::{Error, Result};
use crate::graph::{log_prob_graph, sample_graph, InfoMode};
use crate::harness::aep::{tree_setup, Table};
use crate::harness::config::{as_config, ExperimentConfig, Mode, RunSettings};
use crate::harness::records::ExperimentRecord;
use crate::harness::runner::{grid_jobs, map_jobs, Job};
use crate::rates::graph_aep_entropy;
use crate::rng::rng_from_seed;
use crate::tree::{log_prob_tree, sample_tree_window};

fn save(dir: Option<&Path>, name: String, description: &str, bits: &BitString) -> Result<()> {
    if let Some(dir) = dir {
        let w = BufWriter::new(File::create(dir.join(name))?);
        write_container(w, fnv1a64(description.as_bytes()), bits)?;
    }
    Ok(())
}

fn round_trip_failure(job: &Job) -> Error {
    Error::invalid(format!("decode(encode(x)) != x at n = {}, replicate {}", job.n, job.replicate))
}

/// Encodes one sample per job, checks the round trip and compares the
/// length with `−log₂ P` and with `n H`.
pub fn run_codec(cfg: &ExperimentConfig, s: &RunSettings) -> Result<Table> {
    let dir: Option<PathBuf> = cfg.codec.as_ref().and_then(|c| c.containers.as_ref()).map(|p| cfg.base_dir.join(p));
    if let Some(d) = &dir {
        std::fs::create_dir_all(d)?;
    }
    let dir = dir.as_deref();
    let mode = cfg.mode()?;
    let mode_name = mode.as_str();
    let mut records = Vec::new();
    let comment = if mode == Mode::Tree {
        let t = tree_setup(cfg)?;
        let coder = TreeCoder::new(&t.root, &t.kernel)?;
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
            let tree = match drawn {
                Ok(sample) => sample.tree,
                Err(Error::AttemptsExhausted { attempts }) => {
                    return Ok(vec![row("attempts_exhausted", attempts as f64, f64::NAN)]);
                }
                Err(e) => return Err(e),
            };
            let bits = coder.encode(&tree)?;
            if coder.decode(&bits)? != tree {
                return Err(round_trip_failure(job));
            }
            save(dir, format!("tree_n{}_r{}.aepc", job.n, job.replicate), coder.description(), &bits)?;
            let ideal = -log_prob_tree(&tree, &t.root, &t.kernel)? / LN_2;
            let len = bits.len_bits() as f64;
            Ok(vec![
                row("bits", len, ideal),
                row("bits_per_vertex", len / tree.size() as f64, t.entropy_bits),
            ])
        })?;
        for r in rows {
            records.extend(r?);
        }
        format!(
            "mode={mode_name} seed={}; trees are coded unconditionally (root type, then configurations in preorder)\n\
             bits: payload length; target: -log2 P(T) without size conditioning\n\
             bits_per_vertex: bits / |T|; target: tree entropy H in bits per vertex",
            s.seed
        )
    } else {
        let model = cfg.graph_model()?;
        let info = if mode == Mode::GraphSparse { InfoMode::SparseThm } else { InfoMode::CriticalThm };
        let grid = &cfg.experiment.n;
        if let Some(&n) = grid.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("graph experiments need n ≥ 2, got {n}")));
        }
        let laws = grid.iter().map(|&n| model.law(n)).collect::<Result<Vec<_>>>().map_err(as_config)?;
        let coders = laws.iter().map(GraphCoder::new).collect::<Result<Vec<_>>>()?;
        let h = graph_aep_entropy(model.colour_law(), model.kernel(), info)?;
        let jobs = grid_jobs(grid, cfg.experiment.replicates, s.seed);
        let rows = map_jobs(&jobs, s.workers, |job: &Job| -> Result<Vec<ExperimentRecord>> {
            let start = Instant::now();
            let i = grid.iter().position(|&n| n == job.n).unwrap();
            let (law, coder) = (&laws[i], &coders[i]);
            let x = sample_graph(law, &mut rng_from_seed(job.seed));
            let bits = coder.encode(&x)?;
            if coder.decode(&bits)? != x {
                return Err(round_trip_failure(job));
            }
            save(dir, format!("graph_n{}_r{}.aepc", job.n, job.replicate), coder.description(), &bits)?;
            let ideal = -log_prob_graph(&x, law)? / LN_2;
            let len = bits.len_bits() as f64;
            let nf = job.n as f64;
            let per_vertex = h * info.normalizer(job.n, law.a_n()) / nf;
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
            Ok(vec![row("bits", len, ideal), row("bits_per_vertex", len / nf, per_vertex)])
        })?;
        for r in rows {
            records.extend(r?);
        }
        format!(
            "mode={mode_name} family={} seed={}; symbols: colours, then pairs u<v as edge bits\n\
             bits: payload length; target: -log2 P_n(X)\n\
             bits_per_vertex: bits / n; target: H times the mode's normalization, divided by n",
            model.family(),
            s.seed
        )
    };
    Ok(Table { comment, records, plot_statistic: "bits_per_vertex" })
}
