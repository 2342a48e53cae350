use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::enumerate::all_coloured_graphs;
use crate::graph::{log_prob_graph, sample_graph, write_graph};
use crate::harness::aep::tree_setup;
use crate::harness::config::{as_config, ExperimentConfig, Mode, RunSettings};
use crate::harness::runner::{grid_jobs, map_jobs, Job};
use crate::rng::rng_from_seed;
use crate::tree::{log_prob_tree, sample_tree_window};

/// Largest number of graphs the exhaustive mode will list.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 20;

pub const MANIFEST_HEADER: &str = "n,replicate,seed,file,log_prob";

/// Writes one text file per sample into `dir`, plus `manifest.csv` with the
/// log-probability of each (nats; conditioned on the size for trees).
pub fn run_sample(cfg: &ExperimentConfig, s: &RunSettings) -> Result<()> {
    let dir = s.out.as_deref().ok_or_else(|| Error::Config("sample needs an output directory (--out)".into()))?;
    fs::create_dir_all(dir)?;
    let mode = cfg.mode()?;
    let mut manifest = String::new();
    let _ = writeln!(manifest, "# mode={} seed={}; log_prob in nats", mode.as_str(), s.seed);
    let _ = writeln!(manifest, "{MANIFEST_HEADER}");
    let lines: Vec<Result<String>> = if mode == Mode::Tree {
        let t = tree_setup(cfg)?;
        let jobs = grid_jobs(&t.grid, cfg.experiment.replicates, s.seed);
        map_jobs(&jobs, s.workers, |job: &Job| -> Result<String> {
            let mut rng = rng_from_seed(job.seed);
            let tree = sample_tree_window(job.n, t.window, &t.root, &t.kernel, t.max_attempts, &mut rng)?.tree;
            let name = format!("tree_n{}_r{}.txt", job.n, job.replicate);
            fs::write(dir.join(&name), tree.to_text() + "\n")?;
            let lp = log_prob_tree(&tree, &t.root, &t.kernel)? - t.progeny[tree.size()].ln();
            Ok(format!("{},{},{},{name},{lp}", job.n, job.replicate, job.seed))
        })?
    } else {
        let model = cfg.graph_model()?;
        let grid = &cfg.experiment.n;
        let laws = grid.iter().map(|&n| model.law(n)).collect::<Result<Vec<_>>>().map_err(as_config)?;
        if cfg.experiment.exhaustive {
            for law in &laws {
                write_exhaustive(dir, law)?;
            }
        }
        let jobs = grid_jobs(grid, cfg.experiment.replicates, s.seed);
        map_jobs(&jobs, s.workers, |job: &Job| -> Result<String> {
            let law = &laws[grid.iter().position(|&n| n == job.n).unwrap()];
            let x = sample_graph(law, &mut rng_from_seed(job.seed));
            let name = format!("graph_n{}_r{}.txt", job.n, job.replicate);
            fs::write(dir.join(&name), write_graph(&x))?;
            Ok(format!("{},{},{},{name},{}", job.n, job.replicate, job.seed, log_prob_graph(&x, law)?))
        })?
    };
    for line in lines {
        manifest.push_str(&line?);
        manifest.push('\n');
    }
    fs::write(dir.join("manifest.csv"), manifest)?;
    Ok(())
}

/// Every coloured graph on `n` vertices with its probability.
fn write_exhaustive(dir: &Path, law: &crate::graph::GraphLaw) -> Result<()> {
    let (n, k) = (law.n(), law.k());
    let pairs = n * (n - 1) / 2;
    let count = (k as u64).checked_pow(n as u32).and_then(|c| c.checked_mul(1u64.checked_shl(pairs as u32)?));
    if !matches!(count, Some(c) if c <= EXHAUSTIVE_LIMIT) || pairs >= 32 {
        return Err(Error::Config(format!("exhaustive mode at n = {n}, k = {k} lists too many graphs")));
    }
    let mut body = String::new();
    let mut total = 0.0;
    for (i, x) in all_coloured_graphs(n, k).enumerate() {
        let lp = log_prob_graph(&x, law)?;
        total += lp.exp();
        let colours: Vec<String> = x.colours().iter().map(|c| c.to_string()).collect();
        let edges: Vec<String> = x.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
        let _ = writeln!(body, "{i},{},{},{lp},{}", colours.join(" "), edges.join(" "), lp.exp());
    }
    let text = format!("# n={n} k={k}; total probability {total}\nindex,colours,edges,log_prob,prob\n{body}");
    fs::write(dir.join(format!("exhaustive_n{n}.csv")), text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Overrides;
    use crate::harness::records::read_rows;

    fn run(text: &str, dir: &Path) {
        let cfg = ExperimentConfig::parse(text).unwrap();
        let s = cfg.settings(&Overrides { out: Some(dir.to_path_buf()), ..Default::default() }).unwrap();
        run_sample(&cfg, &s).unwrap();
    }

    const GRAPH: &str = "[graph]\nalphabet = [\"a\", \"b\"]\nmu = [0.6, 0.4]\nc = [0.9, 0.9, 0.9, 0.9]\nfamily = \"custom:3=0.3333333333333333\"\n";

    #[test]
    fn exhaustive_listing_sums_to_one() {
        let dir = tempfile::tempdir().unwrap();
        run(&format!("[experiment]\nseed = 1\nn = [3]\nreplicates = 0\nmode = \"graph_sparse\"\nexhaustive = true\n{GRAPH}"), dir.path());
        let text = fs::read_to_string(dir.path().join("exhaustive_n3.csv")).unwrap();
        let rows = read_rows(&text).unwrap();
        assert_eq!(rows.len(), 64);
        let total: f64 = rows.iter().map(|r| r[4].parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // replicates = 0 leaves a manifest with only the header
        let manifest = fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
        assert!(read_rows(&manifest).unwrap().is_empty());
        assert!(manifest.contains(MANIFEST_HEADER));
    }

    #[test]
    fn reruns_are_identical() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let text = "[experiment]\nseed = 5\nn = [7, 15]\nreplicates = 3\nmode = \"tree\"\n[tree]\npreset = \"binary_critical\"\n";
        run(text, a.path());
        run(text, b.path());
        for name in ["manifest.csv", "tree_n15_r2.txt"] {
            assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
        }
    }
}
