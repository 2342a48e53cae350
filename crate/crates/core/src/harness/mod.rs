//! Experiment driver behind the `aep` binary: config, replicate runner,
//! CSV output and one function per subcommand.

mod aep;
mod codec;
mod config;
mod examples;
mod rates;
mod records;
mod runner;
mod sample;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::Result;

pub use aep::{run_aep, Table, SIZE_SEARCH};
pub use codec::run_codec;
pub use config::{
    CodecSection, Example, ExamplesSection, ExperimentConfig, ExperimentSection, GraphSection, Mode, Overrides,
    RatesSection, RunSettings, TreeSection,
};
pub use examples::{metabolic_report, mtdna_formula_bits, mtdna_report, run_examples, MetabolicReport, MtdnaReport};
pub use rates::{infeasible_i1, random_instance, run_rates, write_rates, RateInstance, RateRow, RATES_HEADER};
pub use records::{means_by_n, read_rows, write_plot, write_records, ExperimentRecord, HEADER};
#[cfg(feature = "parallel")]
pub use runner::map_parallel;
pub use runner::{grid_jobs, map_jobs, map_sequential, Job};
pub use sample::{run_sample, EXHAUSTIVE_LIMIT, MANIFEST_HEADER};

/// Runs `write` against the file at `path` (parents created), or stdout.
fn with_output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            let mut w = BufWriter::new(File::create(p)?);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_table(cfg: &ExperimentConfig, s: &RunSettings, table: &Table) -> Result<()> {
    with_output(s.out.as_deref(), |w| write_records(w, &table.comment, &table.records, cfg.experiment.timing))?;
    if let Some(plot) = &cfg.experiment.plot {
        let points = means_by_n(&table.records, table.plot_statistic);
        with_output(Some(&cfg.base_dir.join(plot)), |w| write_plot(w, &points))?;
    }
    Ok(())
}

pub fn cmd_sample(cfg: &ExperimentConfig, o: &Overrides) -> Result<()> {
    run_sample(cfg, &cfg.settings(o)?)
}

pub fn cmd_aep(cfg: &ExperimentConfig, o: &Overrides) -> Result<()> {
    let s = cfg.settings(o)?;
    let table = run_aep(cfg, &s)?;
    emit_table(cfg, &s, &table)
}

pub fn cmd_rates(cfg: &ExperimentConfig, o: &Overrides) -> Result<()> {
    let s = cfg.settings(o)?;
    let rows = run_rates(cfg, &s)?;
    with_output(s.out.as_deref(), |w| write_rates(w, &rows, s.seed))
}

/// The worked examples are deterministic; a seed is still required so every
/// subcommand has the same contract.
pub fn cmd_examples(cfg: &ExperimentConfig, o: &Overrides) -> Result<()> {
    let s = cfg.settings(o)?;
    let report = run_examples(cfg)?;
    with_output(s.out.as_deref(), |w| Ok(w.write_all(report.as_bytes())?))
}

pub fn cmd_codec(cfg: &ExperimentConfig, o: &Overrides) -> Result<()> {
    let s = cfg.settings(o)?;
    let table = run_codec(cfg, &s)?;
    emit_table(cfg, &s, &table)
}
