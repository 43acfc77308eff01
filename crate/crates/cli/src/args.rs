use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "qsched", version, about = "Delay-power queue scheduling: exact solver and online learners")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Lagrangian MDP exactly; print the gain and write policy.csv.
    Solve(Shared),
    /// Train one learner; write metrics.csv, policy.csv and qtable.csv.
    Train(Shared),
    /// Evaluate every monotone policy; write tradeoff.csv.
    Tradeoff(Shared),
    /// Solve over a lambda grid (sweep.csv) and/or an alpha grid (alpha_sweep.csv).
    Sweep(Shared),
    /// Train several learners over several seeds; write compare.csv and per-run metrics.
    Compare(Shared),
}

impl Command {
    pub fn shared(&self) -> &Shared {
        match self {
            Command::Solve(s) | Command::Train(s) | Command::Tradeoff(s) | Command::Sweep(s) | Command::Compare(s) => s,
        }
    }
}

/// Flags override config-file keys, which override built-in defaults.
#[derive(Debug, Clone, Args)]
pub struct Shared {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,

    /// Buffer size.
    #[arg(long = "B")]
    pub buffer_size: Option<usize>,
    /// Packets per arrival.
    #[arg(long = "M")]
    pub arrival_batch: Option<usize>,
    /// Maximum packets served per slot.
    #[arg(long = "C")]
    pub max_service: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,

    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long = "ref-state")]
    pub ref_state: Option<usize>,

    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated seed list.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// qgreedyucb, qlearning or arl.
    #[arg(long)]
    pub agent: Option<String>,
    /// Comma-separated agent list.
    #[arg(long, value_delimiter = ',')]
    pub agents: Option<Vec<String>>,
    /// Comma-separated lambda grid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambdas: Option<Vec<f64>>,
    /// Comma-separated alpha grid.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Average power budget for the constrained solve.
    #[arg(long = "e-th")]
    pub e_th: Option<f64>,
    /// Largest number of monotone policies `tradeoff` will enumerate.
    #[arg(long = "policy-cap")]
    pub policy_cap: Option<u64>,
    /// Maximum number of metric rows per run.
    #[arg(long = "record-points")]
    pub record_points: Option<usize>,
}

impl Shared {
    pub fn effective_config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => {
                $(if let Some(v) = &self.$f { c.$f = v.clone(); })*
            };
        }
        set!(
            buffer_size, arrival_batch, max_service, alpha, lambda, sigma, delta, epsilon, phi, theta, ref_state,
            horizon, seed, seeds, agent, agents, lambdas, alphas, policy_cap, record_points
        );
        if self.e_th.is_some() {
            c.e_th = self.e_th;
        }
        c.check_seeds()?;
        Ok(c)
    }
}
