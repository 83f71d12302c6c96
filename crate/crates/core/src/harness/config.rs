use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::AgentKind;
use crate::belief::BeliefPrior;
use crate::envs::{BanditSpec, DeepSeaSpec};
use crate::error::{Error, Result};
use crate::mdp::{Layout, Table};

/// A single number applied everywhere, or one value per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(f64),
    Vec(Vec<f64>),
}

impl ScalarOrVec {
    pub fn expand(&self, len: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            Self::Scalar(v) => Ok(vec![*v; len]),
            Self::Vec(v) if v.len() == len => Ok(v.clone()),
            Self::Vec(v) => Err(Error::Config(format!("{what}: expected {len} values, got {}", v.len()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditConfig {
    pub arms: usize,
    #[serde(default = "zero")]
    pub prior_mean: ScalarOrVec,
    #[serde(default = "one")]
    pub prior_var: ScalarOrVec,
    #[serde(default = "unit")]
    pub noise_std: f64,
}

impl BanditConfig {
    pub fn spec(&self) -> Result<BanditSpec> {
        let spec = BanditSpec {
            arms: self.arms,
            prior_means: self.prior_mean.expand(self.arms, "prior_mean")?,
            prior_vars: self.prior_var.expand(self.arms, "prior_var")?,
            noise_std: self.noise_std,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// MDPs drawn from a conjugate prior: Gaussian mean rewards and
/// `Dirichlet(α)` transitions, uniform start over the first layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMdpSpec {
    pub layer_sizes: Vec<usize>,
    pub actions: usize,
    #[serde(default = "zero")]
    pub reward_mean: ScalarOrVec,
    #[serde(default = "one")]
    pub reward_var: ScalarOrVec,
    #[serde(default = "unit")]
    pub noise_std: f64,
    #[serde(default = "unit")]
    pub dirichlet_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvConfig {
    Bandit(BanditConfig),
    Deepsea(DeepSeaSpec),
    RandomMdp(RandomMdpSpec),
}

impl EnvConfig {
    pub fn layout(&self) -> Result<Layout> {
        match self {
            Self::Bandit(b) => Layout::new(vec![1], b.arms),
            Self::Deepsea(d) => Layout::new(vec![d.size; d.size], 2),
            Self::RandomMdp(r) => Layout::new(r.layer_sizes.clone(), r.actions),
        }
    }

    pub fn rho(&self) -> Result<Vec<f64>> {
        let layout = self.layout()?;
        let first = layout.layer_sizes()[0];
        Ok(match self {
            Self::Deepsea(_) => {
                let mut rho = vec![0.0; first];
                rho[0] = 1.0;
                rho
            }
            _ => vec![1.0 / first as f64; first],
        })
    }

    /// Noise scale of the simulated rewards.
    pub fn noise_std(&self) -> f64 {
        match self {
            Self::Bandit(b) => b.noise_std,
            Self::Deepsea(d) => d.noise_std,
            Self::RandomMdp(r) => r.noise_std,
        }
    }

    /// The generative prior of the environment, which agents use unless overridden.
    pub fn prior(&self) -> Result<BeliefPrior<f64>> {
        let layout = self.layout()?;
        let pairs = layout.num_states() * layout.actions();
        let noise_var = self.noise_std() * self.noise_std();
        match self {
            Self::Bandit(b) => b.spec()?.prior(),
            Self::Deepsea(_) => Ok(BeliefPrior::uniform(&layout, 0.0, None, noise_var, 1.0)),
            Self::RandomMdp(r) => Ok(BeliefPrior {
                reward_mean: flat_table(&layout, r.reward_mean.expand(pairs, "reward_mean")?)?,
                reward_var: flat_table(&layout, r.reward_var.expand(pairs, "reward_var")?)?,
                noise_var,
                dirichlet_alpha: r.dirichlet_alpha,
            }),
        }
    }

    pub fn is_bandit(&self) -> bool {
        matches!(self, Self::Bandit(_))
    }
}

fn flat_table(layout: &Layout, values: Vec<f64>) -> Result<Table<f64>> {
    let rows: Vec<Vec<f64>> = values.chunks(layout.actions()).map(<[f64]>::to_vec).collect();
    Table::from_rows(&rows)
}

/// Replaces parts of the agents' prior, e.g. for misspecification studies.
/// Vectors are indexed by `(state, action)` pair, `x * A + a`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorOverride {
    #[serde(default)]
    pub reward_mean: Option<ScalarOrVec>,
    #[serde(default)]
    pub reward_var: Option<ScalarOrVec>,
    #[serde(default)]
    pub noise_std: Option<f64>,
    #[serde(default)]
    pub dirichlet_alpha: Option<f64>,
}

impl PriorOverride {
    pub fn apply(&self, layout: &Layout, mut prior: BeliefPrior<f64>) -> Result<BeliefPrior<f64>> {
        let pairs = layout.num_states() * layout.actions();
        if let Some(m) = &self.reward_mean {
            prior.reward_mean = flat_table(layout, m.expand(pairs, "agent_prior.reward_mean")?)?;
        }
        if let Some(v) = &self.reward_var {
            prior.reward_var = flat_table(layout, v.expand(pairs, "agent_prior.reward_var")?)?;
        }
        if let Some(s) = self.noise_std {
            prior.noise_var = s * s;
        }
        if let Some(a) = self.dirichlet_alpha {
            prior.dirichlet_alpha = a;
        }
        Ok(prior)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    #[serde(flatten)]
    pub kind: AgentKind,
    /// Name used in outputs; defaults to the agent kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl AgentConfig {
    pub fn new(kind: AgentKind) -> Self {
        Self { kind, label: None }
    }

    pub fn name(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.to_string())
    }
}

impl From<AgentKind> for AgentConfig {
    fn from(kind: AgentKind) -> Self {
        Self::new(kind)
    }
}

/// Which episodes get a log row. The final episode is always logged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogCadence {
    /// Episodes `ceil(r^k)`, `k = 0, 1, ...`.
    Geometric(f64),
    Every(u64),
    Points(Vec<u64>),
}

impl Default for LogCadence {
    fn default() -> Self {
        Self::Geometric(1.25)
    }
}

impl LogCadence {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Geometric(r) if !(*r > 1.0 && r.is_finite()) => {
                Err(Error::Config(format!("geometric log ratio {r} must exceed 1")))
            }
            Self::Every(0) => Err(Error::Config("log interval must be positive".into())),
            _ => Ok(()),
        }
    }

    /// Sorted, distinct episodes in `1..=n` to log.
    pub fn points(&self, n: u64) -> Vec<u64> {
        let mut pts = match self {
            Self::Geometric(r) => {
                let mut pts = Vec::new();
                let mut x = 1.0_f64;
                while x.ceil() <= n as f64 {
                    pts.push(x.ceil() as u64);
                    x *= r;
                }
                pts
            }
            Self::Every(k) => (1..=n / k).map(|i| i * k).collect(),
            Self::Points(p) => p.iter().copied().filter(|&t| t >= 1 && t <= n).collect(),
        };
        pts.push(n);
        pts.sort_unstable();
        pts.dedup();
        pts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub agents: Vec<AgentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episodes: Option<u64>,
    /// Total environment steps; `episodes × L` when both are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timesteps: Option<u64>,
    #[serde(default = "one_run")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub log: LogCadence,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_prior: Option<PriorOverride>,
    /// Record elapsed wall time per logged row; off by default so outputs
    /// are reproducible bit for bit.
    #[serde(default)]
    pub wall_time: bool,
}

fn zero() -> ScalarOrVec {
    ScalarOrVec::Scalar(0.0)
}

fn one() -> ScalarOrVec {
    ScalarOrVec::Scalar(1.0)
}

fn unit() -> f64 {
    1.0
}

fn one_run() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(env: EnvConfig, agents: Vec<AgentConfig>, episodes: u64) -> Self {
        Self {
            env,
            agents,
            episodes: Some(episodes),
            timesteps: None,
            runs: 1,
            seed: 0,
            log: LogCadence::default(),
            output: None,
            agent_prior: None,
            wall_time: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Number of episodes, reconciling `episodes` and `timesteps`.
    pub fn num_episodes(&self) -> Result<u64> {
        let horizon = self.env.layout()?.horizon() as u64;
        let n = match (self.episodes, self.timesteps) {
            (Some(n), Some(t)) if n * horizon != t => {
                return Err(Error::Config(format!(
                    "episodes × L = {} does not match timesteps {t}",
                    n * horizon
                )))
            }
            (Some(n), _) => n,
            (None, Some(t)) if t % horizon != 0 => {
                return Err(Error::Config(format!("timesteps {t} is not a multiple of L = {horizon}")))
            }
            (None, Some(t)) => t / horizon,
            (None, None) => return Err(Error::Config("one of episodes or timesteps is required".into())),
        };
        if n == 0 {
            return Err(Error::Config("at least one episode is required".into()));
        }
        Ok(n)
    }

    /// The prior every agent starts from.
    pub fn agent_prior(&self) -> Result<BeliefPrior<f64>> {
        let layout = self.env.layout()?;
        let base = self.env.prior()?;
        match &self.agent_prior {
            Some(o) => o.apply(&layout, base),
            None => Ok(base),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let config_err = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        let layout = self.env.layout().map_err(config_err)?;
        self.num_episodes()?;
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.agents.is_empty() {
            return Err(Error::Config("no agents configured".into()));
        }
        self.log.validate()?;
        let mut names = HashSet::new();
        for agent in &self.agents {
            if !names.insert(agent.name()) {
                return Err(Error::Config(format!("duplicate agent name '{}'", agent.name())));
            }
            if agent.kind.bandit_only() && !self.env.is_bandit() {
                return Err(Error::Config(format!("agent '{}' runs only on bandit environments", agent.name())));
            }
            if agent.kind.is_klearning() && layout.actions() < 2 {
                return Err(Error::Config("K-learning needs at least two actions".into()));
            }
        }
        if let EnvConfig::Deepsea(spec) = &self.env {
            crate::envs::build_deepsea::<f64>(spec).map_err(config_err)?;
        }
        if let EnvConfig::RandomMdp(r) = &self.env {
            crate::belief::BeliefState::new(layout.clone(), self.env.rho()?, &self.env.prior()?)
                .map_err(config_err)?;
            if !(r.noise_std > 0.0) {
                return Err(Error::Config("noise_std must be positive".into()));
            }
        }
        let prior = self.agent_prior().map_err(config_err)?;
        crate::belief::BeliefState::new(layout, self.env.rho()?, &prior).map_err(config_err)?;
        Ok(())
    }
}
