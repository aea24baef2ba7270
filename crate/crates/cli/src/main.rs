use std::process::ExitCode;

use clap::Parser;
use oet_cli::config::{Cli, ExperimentConfig};
use oet_cli::dataset::emit;
use oet_cli::experiments;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oet: error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = ExperimentConfig::from_cli(cli)?;
    if cfg.seed_is_random {
        eprintln!("oet: master seed {}", cfg.seed);
    }
    let outcome = experiments::run(&cfg)?;
    for note in &outcome.notes {
        eprintln!("oet: note: {note}");
    }
    emit(&outcome.records, cfg.format, cfg.out.as_deref())?;
    Ok(())
}
