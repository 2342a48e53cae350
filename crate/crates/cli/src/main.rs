use std::path::PathBuf;
use std::process::ExitCode;

use aep_core::harness::{cmd_aep, cmd_codec, cmd_examples, cmd_rates, cmd_sample, ExperimentConfig, Overrides};
use aep_core::Error;
use clap::{Args, Parser, Subcommand};

/// Sampling, AEP studies, rate certification and coding experiments for
/// multitype Galton–Watson trees and coloured random graphs.
#[derive(Parser)]
#[command(name = "aep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write sampled graphs or trees and a manifest into a directory.
    Sample(Common),
    /// Per-replicate information statistics against their analytic targets.
    Aep(Common),
    /// Certify numerical suprema against closed-form rate functions.
    Rates(Common),
    /// Report for the mtDNA or metabolic-network example.
    Examples(Common),
    /// Code samples with the model-driven range coder.
    Codec(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides experiment.seed.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Output file (a directory for `sample`); stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
}

fn run(cli: Cli) -> Result<(), Error> {
    let (common, cmd): (&Common, fn(&ExperimentConfig, &Overrides) -> aep_core::Result<()>) = match &cli.command {
        Command::Sample(c) => (c, cmd_sample),
        Command::Aep(c) => (c, cmd_aep),
        Command::Rates(c) => (c, cmd_rates),
        Command::Examples(c) => (c, cmd_examples),
        Command::Codec(c) => (c, cmd_codec),
    };
    let cfg = ExperimentConfig::load(&common.config)?;
    let overrides = Overrides { seed: common.seed, out: common.out.clone(), workers: common.workers };
    cmd(&cfg, &overrides)
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors, matching config errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("aep: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("aep: {e}");
            ExitCode::from(3)
        }
    }
}
