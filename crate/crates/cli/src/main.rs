mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::UsageError;
use output::OutDir;

fn run(cli: &Cli) -> anyhow::Result<()> {
    let shared = cli.command.shared();
    let cfg = shared.effective_config()?;
    let out = OutDir::new(&shared.out)?;
    match &cli.command {
        Command::Solve(_) => commands::solve(&cfg, &out),
        Command::Train(_) => commands::train(&cfg, &out),
        Command::Tradeoff(_) => commands::tradeoff(&cfg, &out),
        Command::Sweep(_) => commands::sweep(&cfg, &out),
        Command::Compare(_) => commands::compare(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
