use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qsched_core::{AgentKind, LearnerConfig, QueueParams, State};
use serde::{Deserialize, Serialize};

/// Every tunable of every command. Missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(rename = "B")]
    pub buffer_size: usize,
    #[serde(rename = "M")]
    pub arrival_batch: usize,
    #[serde(rename = "C")]
    pub max_service: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub phi: f64,
    pub theta: f64,
    pub ref_state: usize,
    pub horizon: u64,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub agent: String,
    pub agents: Vec<String>,
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Average power budget for the constrained solve in `tradeoff`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_th: Option<f64>,
    pub policy_cap: u64,
    pub record_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let l = LearnerConfig::default();
        Self {
            buffer_size: 10,
            arrival_batch: 5,
            max_service: 4,
            alpha: 0.4,
            lambda: 1.0,
            sigma: l.sigma,
            delta: l.delta,
            epsilon: l.epsilon,
            phi: l.phi,
            theta: l.theta,
            ref_state: l.ref_state.0,
            horizon: 1_000_000,
            seed: 1,
            seeds: (1..=10).collect(),
            agent: AgentKind::QGreedyUcb.name().into(),
            agents: AgentKind::ALL.iter().map(|k| k.name().to_string()).collect(),
            lambdas: Vec::new(),
            alphas: Vec::new(),
            e_th: None,
            policy_cap: 1_000_000,
            record_points: 2000,
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "B", "M", "C", "alpha", "lambda", "sigma", "delta", "epsilon", "phi", "theta", "ref_state", "horizon", "seed",
    "seeds", "agent", "agents", "lambdas", "alphas", "e_th", "policy_cap", "record_points",
];

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().context("config is not valid TOML")?;
        let unknown: Vec<&str> =
            table.keys().map(String::as_str).filter(|k| !KNOWN_KEYS.contains(k)).collect();
        if !unknown.is_empty() {
            bail!("unknown config keys: {}", unknown.join(", "));
        }
        table.try_into().context("config has a value of the wrong type")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml_str(&text).with_context(|| format!("in config {}", path.display()))
    }

    #[cfg(test)]
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn params(&self) -> QueueParams {
        QueueParams::new(self.buffer_size, self.arrival_batch, self.max_service, self.alpha, self.lambda)
    }

    pub fn learner(&self) -> LearnerConfig {
        LearnerConfig {
            sigma: self.sigma,
            delta: self.delta,
            epsilon: self.epsilon,
            phi: self.phi,
            theta: self.theta,
            ref_state: State(self.ref_state),
            seed: self.seed,
        }
    }

    /// Seeds must fit a TOML integer so the metadata sidecar can echo them.
    pub fn check_seeds(&self) -> Result<()> {
        let too_big: Vec<String> = std::iter::once(&self.seed)
            .chain(&self.seeds)
            .filter(|&&s| s > i64::MAX as u64)
            .map(u64::to_string)
            .collect();
        if !too_big.is_empty() {
            bail!("seeds must not exceed {}: {}", i64::MAX, too_big.join(", "));
        }
        Ok(())
    }

    pub fn agent_kind(&self) -> Result<AgentKind> {
        Ok(self.agent.parse()?)
    }

    /// Parsed agent list; duplicates are an error.
    pub fn agent_kinds(&self) -> Result<Vec<AgentKind>> {
        let kinds = self.agents.iter().map(|a| a.parse::<AgentKind>()).collect::<Result<Vec<_>, _>>()?;
        let mut seen = BTreeSet::new();
        let dups: Vec<&str> = kinds.iter().filter(|k| !seen.insert(**k)).map(|k| k.name()).collect();
        if !dups.is_empty() {
            bail!("duplicate agent kinds: {}", dups.join(", "));
        }
        Ok(kinds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_defaults_and_custom() {
        let d = RunConfig::default();
        assert_eq!(RunConfig::from_toml_str(&d.to_toml_string()).unwrap(), d);
        let c = RunConfig {
            buffer_size: 12,
            max_service: 5,
            alpha: 0.1 + 0.2,
            lambdas: vec![0.0, 0.25, 1e-300],
            seeds: vec![i64::MAX as u64, 0],
            e_th: Some(1.5),
            agents: vec!["arl".into()],
            ..d
        };
        let text = c.to_toml_string();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml_string(), text);
    }

    #[test]
    fn missing_keys_default() {
        let c = RunConfig::from_toml_str("B = 12\nC = 5\n").unwrap();
        assert_eq!((c.buffer_size, c.arrival_batch, c.max_service), (12, 5, 5));
        assert_eq!(c.horizon, RunConfig::default().horizon);
    }

    #[test]
    fn all_unknown_keys_listed() {
        let err = RunConfig::from_toml_str("B = 12\nbufer = 3\nalpah = 0.4\n").unwrap_err().to_string();
        assert!(err.contains("bufer") && err.contains("alpah"), "{err}");
    }

    #[test]
    fn wrong_type_rejected() {
        assert!(RunConfig::from_toml_str("alpha = \"high\"\n").is_err());
    }

    #[test]
    fn duplicate_agents_rejected() {
        let c = RunConfig { agents: vec!["arl".into(), "qlearning".into(), "arl".into()], ..Default::default() };
        assert!(c.agent_kinds().unwrap_err().to_string().contains("arl"));
        let c = RunConfig { agents: vec!["sarsa".into()], ..Default::default() };
        assert!(c.agent_kinds().is_err());
    }
}
