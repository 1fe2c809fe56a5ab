//! `gamma-echo`: echo, roughness and Wigner experiments for the gamma oscillator.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::commands::Output;
use crate::config::{Command, Overrides};
use crate::output::{suffixed_path, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "gamma-echo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Echo time series O(t) with cumulative mean and variance.
    Echo(Overrides),
    /// Long-time echo statistics compared with the published reference tables.
    Tables(Overrides),
    /// Saturation-law fit of the long-time echo mean against number spread.
    Saturation(Overrides),
    /// Roughness R(t) of the evolving state.
    Roughness(Overrides),
    /// Long-time roughness of random-state ensembles per basis size.
    RoughnessEnsemble(Overrides),
    /// Wigner fields of ρ(t), its diagonal split, and the overlap operator.
    Wigner(Overrides),
}

impl Sub {
    fn parts(&self) -> (Command, &Overrides) {
        match self {
            Sub::Echo(o) => (Command::Echo, o),
            Sub::Tables(o) => (Command::Tables, o),
            Sub::Saturation(o) => (Command::Saturation, o),
            Sub::Roughness(o) => (Command::Roughness, o),
            Sub::RoughnessEnsemble(o) => (Command::RoughnessEnsemble, o),
            Sub::Wigner(o) => (Command::Wigner, o),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (command, overrides) = cli.command.parts();
    let config = config::load(overrides)?.resolve(command)?;
    let outputs = match command {
        Command::Echo => commands::echo(&config)?,
        Command::Tables => commands::tables(&config)?,
        Command::Saturation => commands::saturation(&config)?,
        Command::Roughness => commands::roughness_series(&config)?,
        Command::RoughnessEnsemble => commands::roughness_ensemble(&config)?,
        Command::Wigner => commands::wigner_fields(&config)?,
    };

    let single = outputs.len() == 1;
    let stdout = std::io::stdout();
    for Output { suffix, table } in outputs {
        let text = table.render(&config, config.format)?;
        match &config.out {
            Some(path) => {
                let path = match (&suffix, single) {
                    (Some(s), false) => suffixed_path(path, s),
                    _ => path.clone(),
                };
                write_atomic(&path, &text)?;
                eprintln!("wrote {}", path.display());
            }
            None => stdout.lock().write_all(text.as_bytes())?,
        }
        for (key, value) in &table.summary {
            eprintln!("{}{key} = {value}", suffix.as_ref().map(|s| format!("[{s}] ")).unwrap_or_default());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
