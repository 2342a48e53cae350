use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphModel, ScalingFamily};
use crate::measures::{Alphabet, ConnectionKernel, ProbVector};
use crate::tree::OffspringKernel;

/// Which model and normalization an experiment runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    GraphSparse,
    GraphCritical,
    Tree,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::GraphSparse => "graph_sparse",
            Mode::GraphCritical => "graph_critical",
            Mode::Tree => "tree",
        }
    }
}

/// A run description. Sections are flat key/value tables; each command reads
/// only the sections it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RatesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub examples: Option<ExamplesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codec: Option<CodecSection>,
    /// Directory that relative paths in the config are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    /// Base seed; may instead be given on the command line, but one of the
    /// two is required.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// 0 means one worker per core.
    #[serde(default)]
    pub workers: usize,
    /// Appends a `wall_ms` column; off by default so reruns are byte-identical.
    #[serde(default)]
    pub timing: bool,
    /// Two-column `n mean` file for gnuplot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    /// `sample` only: enumerate every coloured graph for each `n`.
    #[serde(default)]
    pub exhaustive: bool,
}

fn default_replicates() -> u64 {
    1
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            seed: None,
            n: Vec::new(),
            replicates: default_replicates(),
            mode: None,
            out: None,
            workers: 0,
            timing: false,
            plot: None,
            exhaustive: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub alphabet: Vec<String>,
    pub mu: Vec<f64>,
    /// `k × k`, row-major, symmetric.
    pub c: Vec<f64>,
    /// `sparse`, `inv_n_log_n`, `log_n_over_n`, `power:θ` or `custom:n=a,…`.
    pub family: String,
}

impl GraphSection {
    pub fn model(&self) -> Result<GraphModel> {
        let al = Alphabet::new(self.alphabet.iter().cloned())?;
        let family: ScalingFamily = self.family.parse()?;
        GraphModel::new(ProbVector::new(al.clone(), self.mu.clone())?, ConnectionKernel::new(al, self.c.clone())?, family)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSection {
    /// Needed when the kernel is given by `preset`; kernel text names its
    /// own symbols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    /// Root type law; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_file: Option<PathBuf>,
    /// `binary_critical` or `mtdna` (uses `p`, `q`, `alpha`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Accept sizes in `[n, n + window]` instead of exactly `n`.
    #[serde(default)]
    pub window: usize,
    #[serde(default = "default_attempts")]
    pub max_attempts: u64,
}

fn default_attempts() -> u64 {
    1_000_000
}

impl TreeSection {
    pub fn model(&self, base_dir: &Path) -> Result<(ProbVector, OffspringKernel)> {
        let given = [self.kernel.is_some(), self.kernel_file.is_some(), self.preset.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(Error::Config("[tree] needs exactly one of kernel, kernel_file, preset".into()));
        }
        let alphabet = self.alphabet.as_ref().map(|a| Alphabet::new(a.iter().cloned())).transpose()?;
        let kernel = if let Some(text) = &self.kernel {
            OffspringKernel::parse(text, alphabet)?
        } else if let Some(file) = &self.kernel_file {
            let text = std::fs::read_to_string(base_dir.join(file))
                .map_err(|e| Error::Config(format!("{}: {e}", file.display())))?;
            OffspringKernel::parse(&text, alphabet)?
        } else {
            match self.preset.as_deref() {
                Some("binary_critical") => OffspringKernel::binary_critical(),
                Some("mtdna") => {
                    OffspringKernel::mtdna(self.p.unwrap_or(0.5), self.q.unwrap_or(0.5), self.alpha.unwrap_or(0.5))?
                }
                Some(other) => return Err(Error::Config(format!("unknown tree preset {other:?}"))),
                None => unreachable!(),
            }
        };
        let root = match &self.root {
            Some(w) => ProbVector::new(kernel.alphabet().clone(), w.clone())?,
            None => ProbVector::uniform(kernel.alphabet().clone()),
        };
        Ok((root, kernel))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_ks")]
    pub k: Vec<usize>,
    /// Instances built so that the supremum is infinite.
    #[serde(default = "default_infeasible")]
    pub infeasible: usize,
}

fn default_instances() -> usize {
    100
}

fn default_ks() -> Vec<usize> {
    vec![2, 3]
}

fn default_infeasible() -> usize {
    20
}

impl Default for RatesSection {
    fn default() -> Self {
        Self { instances: default_instances(), k: default_ks(), infeasible: default_infeasible() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    Mtdna,
    Metabolic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExamplesSection {
    pub which: Example,
    #[serde(default = "half")]
    pub alpha: f64,
    #[serde(default = "half")]
    pub p: f64,
    #[serde(default = "half")]
    pub q: f64,
    #[serde(default = "default_example_n")]
    pub n: usize,
    /// Metabolic kernel, `2 × 2` row-major; `C ≡ 1` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    /// Metabolic colour law; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
}

fn half() -> f64 {
    0.5
}

fn default_example_n() -> usize {
    1024
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodecSection {
    /// Directory for `AEPC1` container files, one per instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub containers: Option<PathBuf>,
}

/// Command-line values that take precedence over the config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// What a command needs after merging config and overrides.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn settings(&self, o: &Overrides) -> Result<RunSettings> {
        let seed = o
            .seed
            .or(self.experiment.seed)
            .ok_or_else(|| Error::Config("no seed: set experiment.seed or pass --seed".into()))?;
        Ok(RunSettings {
            seed,
            out: o.out.clone().or_else(|| self.experiment.out.as_ref().map(|p| self.base_dir.join(p))),
            workers: o.workers.unwrap_or(self.experiment.workers),
        })
    }

    pub fn mode(&self) -> Result<Mode> {
        self.experiment.mode.ok_or_else(|| Error::Config("experiment.mode is required".into()))
    }

    pub fn graph_model(&self) -> Result<GraphModel> {
        self.graph
            .as_ref()
            .ok_or_else(|| Error::Config("missing [graph] section".into()))?
            .model()
            .map_err(as_config)
    }

    pub fn tree_model(&self) -> Result<(ProbVector, OffspringKernel)> {
        self.tree_section()?.model(&self.base_dir).map_err(as_config)
    }

    pub fn tree_section(&self) -> Result<&TreeSection> {
        self.tree.as_ref().ok_or_else(|| Error::Config("missing [tree] section".into()))
    }
}

/// Anything wrong while building models from the config is a config error.
pub(crate) fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
[experiment]
seed = 7
n = [10, 20]
replicates = 3
mode = "graph_critical"

[graph]
alphabet = ["a", "b"]
mu = [0.5, 0.5]
c = [2.0, 2.0, 2.0, 2.0]
family = "inv_n_log_n"

[tree]
kernel = """
a | - | 0.5
a | a a | 0.5
"""
"#;

    #[test]
    fn parse_serialize_round_trip() {
        let cfg = ExperimentConfig::parse(FULL).unwrap();
        assert_eq!(cfg.experiment.n, vec![10, 20]);
        assert_eq!(cfg.mode().unwrap(), Mode::GraphCritical);
        let again = ExperimentConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(cfg.graph_model().unwrap().k(), 2);
        let (root, q) = cfg.tree_model().unwrap();
        assert_eq!(root.weights(), &[1.0]);
        assert_eq!(q.k(), 1);
    }

    #[test]
    fn seed_is_mandatory() {
        let cfg = ExperimentConfig::parse("[experiment]\nn = [3]\n").unwrap();
        assert!(matches!(cfg.settings(&Overrides::default()), Err(Error::Config(_))));
        let s = cfg.settings(&Overrides { seed: Some(4), ..Default::default() }).unwrap();
        assert_eq!(s.seed, 4);
    }

    #[test]
    fn bad_configs_are_config_errors() {
        assert!(matches!(ExperimentConfig::parse("[experiment]\nbogus = 1\n"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse("[experiment]\nmode = \"nope\"\n"), Err(Error::Config(_))));
        let cfg = ExperimentConfig::parse(
            "[graph]\nalphabet = [\"a\"]\nmu = [0.5]\nc = [1.0]\nfamily = \"sparse\"\n",
        )
        .unwrap();
        assert!(matches!(cfg.graph_model(), Err(Error::Config(_))));
        let cfg = ExperimentConfig::parse("[tree]\npreset = \"mtdna\"\nalpha = 1.5\n").unwrap();
        assert!(matches!(cfg.tree_model(), Err(Error::Config(_))));
    }
}
