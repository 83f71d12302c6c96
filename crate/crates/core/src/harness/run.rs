use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{
    epsilon_greedy_episode, psrl_episode, thompson_bandit_step, ucb_bandit_step, ucbvi_episode, AgentKind,
};
use crate::belief::BeliefState;
use crate::envs::{build_deepsea, instantiate_bandit, sample_env_from_prior};
use crate::error::{Error, Result};
use crate::klearning::{klearning_episode, TauMode, TauSearch};
use crate::mdp::{expect_initial, greedy_policy, performance, solve_optimal, LayeredMdp, Policy};

use super::config::{EnvConfig, ExperimentConfig};

/// One logged episode of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub episode: u64,
    /// `Σ_t (J* - J^{π_t})`, expected values on the true environment.
    pub cum_regret: f64,
    /// `Σ_t Φ^t`, K-learning agents only.
    pub cum_bound: Option<f64>,
    pub tau: Option<f64>,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub agent: String,
    pub run: usize,
    pub rows: Vec<LogRow>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of random stream `stream` in run `run`. Stream 0 draws the
/// environment; stream `i + 1` belongs to the `i`-th configured agent.
pub fn seed_for(base: u64, stream: u64, run: u64) -> u64 {
    splitmix(splitmix(splitmix(base) ^ stream) ^ run.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// `2σ sqrt(t A ln A (1 + ln t))`, the Bayesian-regret bound of the bandit schedule.
pub fn bandit_regret_bound(t: f64, sigma: f64, arms: usize) -> f64 {
    let a = arms as f64;
    2.0 * sigma * (t * a * a.ln() * (1.0 + t.ln())).sqrt()
}

fn instantiate_env(config: &ExperimentConfig, run: usize) -> Result<LayeredMdp<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(config.seed, 0, run as u64));
    match &config.env {
        EnvConfig::Bandit(b) => instantiate_bandit(&b.spec()?, &mut rng),
        EnvConfig::Deepsea(spec) => build_deepsea(spec),
        EnvConfig::RandomMdp(_) => {
            let prior = BeliefState::new(config.env.layout()?, config.env.rho()?, &config.env.prior()?)?;
            sample_env_from_prior(&prior, &mut rng).with_reward_noise_std(config.env.noise_std())
        }
    }
}

struct Decision {
    policy: Policy<f64>,
    tau: Option<f64>,
    bound: Option<f64>,
}

fn single_state(action: usize, actions: usize) -> Policy<f64> {
    Policy::deterministic(&[action], actions)
}

fn decide(
    kind: AgentKind,
    belief: &BeliefState<f64>,
    oracle: &Policy<f64>,
    search: &TauSearch<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Decision> {
    let plain = |policy| Decision {
        policy,
        tau: None,
        bound: None,
    };
    let t = belief.episode();
    Ok(match kind {
        AgentKind::KlearningScheduled | AgentKind::KlearningOptimal => {
            let mode = if kind == AgentKind::KlearningOptimal {
                TauMode::Optimal
            } else {
                TauMode::Scheduled
            };
            let sol = klearning_episode(belief, mode, search)?.solution;
            Decision {
                tau: Some(sol.tau.get()),
                bound: Some(sol.certificate.phi),
                policy: sol.policy,
            }
        }
        AgentKind::Thompson => plain(single_state(thompson_bandit_step(belief, rng)?, belief.actions())),
        AgentKind::Ucb => plain(single_state(ucb_bandit_step(belief, t, rng)?, belief.actions())),
        AgentKind::Psrl => plain(psrl_episode(belief, rng)),
        AgentKind::Ucbvi { bonus_scale } => plain(ucbvi_episode(belief, t, bonus_scale)),
        AgentKind::EpsilonGreedy { epsilon } => plain(epsilon_greedy_episode(belief, epsilon)?),
        AgentKind::Oracle => plain(oracle.clone()),
        AgentKind::Uniform => plain(Policy::uniform(belief.num_states(), belief.actions())),
    })
}

/// Runs every configured agent on the environment instance of run `run`.
pub fn run_single(config: &ExperimentConfig, run: usize) -> Result<Vec<RunRecord>> {
    let episodes = config.num_episodes()?;
    let points = config.log.points(episodes);
    let env = instantiate_env(config, run)?;
    let optimal = solve_optimal(&env);
    let j_star = expect_initial(env.layout(), env.rho(), &optimal.v);
    let oracle = greedy_policy(&optimal.q);
    let prior = config.agent_prior()?;
    let rho = config.env.rho()?;
    let search = TauSearch::default();
    let mut out = Vec::with_capacity(config.agents.len());
    for (i, agent) in config.agents.iter().enumerate() {
        let name = agent.name();
        let seed = seed_for(config.seed, i as u64 + 1, run as u64);
        let mut agent_rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sim_rng = ChaCha8Rng::seed_from_u64(seed);
        sim_rng.set_stream(1);
        let mut belief = BeliefState::new(env.layout().clone(), rho.clone(), &prior)?;
        let start = Instant::now();
        let mut rows = Vec::with_capacity(points.len());
        let mut next_point = points.iter().peekable();
        let (mut cum_regret, mut cum_bound) = (0.0, 0.0);
        for t in 1..=episodes {
            let decision = decide(agent.kind, &belief, &oracle, &search, &mut agent_rng)?;
            let regret = j_star - performance(&env, &decision.policy)?;
            if !regret.is_finite() {
                return Err(Error::NonFinite(format!("regret of agent '{name}' in run {run}, episode {t}")));
            }
            cum_regret += regret;
            if let Some(phi) = decision.bound {
                cum_bound += phi;
            }
            let steps = env.rollout(&decision.policy, &mut sim_rng);
            belief.observe_episode(&steps)?;
            if next_point.peek() == Some(&&t) {
                next_point.next();
                rows.push(LogRow {
                    episode: t,
                    cum_regret,
                    cum_bound: decision.bound.map(|_| cum_bound),
                    tau: decision.tau,
                    wall_ms: config
                        .wall_time
                        .then(|| start.elapsed().as_secs_f64() * 1e3),
                });
            }
        }
        out.push(RunRecord { agent: name, run, rows });
    }
    Ok(out)
}

/// All runs on the current rayon pool, ordered by (agent, run).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let per_run: Vec<Vec<RunRecord>> = (0..config.runs)
        .into_par_iter()
        .map(|run| run_single(config, run))
        .collect::<Result<_>>()?;
    let agents = config.agents.len();
    let mut records = Vec::with_capacity(agents * config.runs);
    for i in 0..agents {
        for run in &per_run {
            records.push(run[i].clone());
        }
    }
    Ok(records)
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(config: &ExperimentConfig, threads: usize) -> Result<Vec<RunRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| run_experiment(config))
}
