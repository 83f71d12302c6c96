//! Comparison agents: Thompson sampling and UCB for bandits, PSRL, UCBVI
//! and ε-greedy for MDPs.
//!
//! Every function is a pure map from a belief (plus a caller-owned rng where
//! randomness is needed) to an action or a policy.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::belief::BeliefState;
use crate::error::{Error, Result};
use crate::mdp::{backward, greedy_policy, greedy_policy_uniform_ties, solve_optimal, Dynamics, Policy, Table, ValueTables};
use crate::sampling;
use crate::Scalar;

/// Agent selector as written in experiment configs.
///
/// `oracle` (greedy on the true MDP) and `uniform` are reference agents for
/// checking the harness itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAgent", into = "RawAgent")]
pub enum AgentKind {
    KlearningScheduled,
    KlearningOptimal,
    Thompson,
    Ucb,
    Psrl,
    Ucbvi { bonus_scale: f64 },
    EpsilonGreedy { epsilon: f64 },
    Oracle,
    Uniform,
}

impl AgentKind {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::KlearningScheduled => "klearning_scheduled",
            Self::KlearningOptimal => "klearning_optimal",
            Self::Thompson => "thompson",
            Self::Ucb => "ucb",
            Self::Psrl => "psrl",
            Self::Ucbvi { .. } => "ucbvi",
            Self::EpsilonGreedy { .. } => "epsilon_greedy",
            Self::Oracle => "oracle",
            Self::Uniform => "uniform",
        }
    }

    pub fn is_klearning(&self) -> bool {
        matches!(self, Self::KlearningScheduled | Self::KlearningOptimal)
    }

    /// Thompson sampling and UCB are defined only for single-state, single-step problems.
    pub fn bandit_only(&self) -> bool {
        matches!(self, Self::Thompson | Self::Ucb)
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ucbvi { bonus_scale } if *bonus_scale != 1.0 => write!(f, "ucbvi({bonus_scale})"),
            Self::EpsilonGreedy { epsilon } => write!(f, "epsilon_greedy({epsilon})"),
            other => f.write_str(other.tag()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bonus_scale: Option<f64>,
}

impl TryFrom<RawAgent> for AgentKind {
    type Error = Error;

    fn try_from(raw: RawAgent) -> Result<Self> {
        let no_params = |kind: AgentKind| -> Result<AgentKind> {
            if raw.epsilon.is_some() || raw.bonus_scale.is_some() {
                return Err(Error::Config(format!("agent '{}' takes no parameters", raw.kind)));
            }
            Ok(kind)
        };
        match raw.kind.as_str() {
            "klearning_scheduled" => no_params(Self::KlearningScheduled),
            "klearning_optimal" => no_params(Self::KlearningOptimal),
            "thompson" => no_params(Self::Thompson),
            "ucb" => no_params(Self::Ucb),
            "psrl" => no_params(Self::Psrl),
            "oracle" => no_params(Self::Oracle),
            "uniform" => no_params(Self::Uniform),
            "ucbvi" => {
                if raw.epsilon.is_some() {
                    return Err(Error::Config("ucbvi takes bonus_scale, not epsilon".into()));
                }
                let bonus_scale = raw.bonus_scale.unwrap_or(1.0);
                if !(bonus_scale >= 0.0 && bonus_scale.is_finite()) {
                    return Err(Error::Config(format!("bonus_scale {bonus_scale} must be nonnegative")));
                }
                Ok(Self::Ucbvi { bonus_scale })
            }
            "epsilon_greedy" => {
                if raw.bonus_scale.is_some() {
                    return Err(Error::Config("epsilon_greedy takes epsilon, not bonus_scale".into()));
                }
                let epsilon = raw
                    .epsilon
                    .ok_or_else(|| Error::Config("epsilon_greedy requires epsilon".into()))?;
                if !(0.0..=1.0).contains(&epsilon) {
                    return Err(Error::Config(format!("epsilon {epsilon} must lie in [0, 1]")));
                }
                Ok(Self::EpsilonGreedy { epsilon })
            }
            other => Err(Error::Config(format!("unknown agent kind '{other}'"))),
        }
    }
}

impl From<AgentKind> for RawAgent {
    fn from(kind: AgentKind) -> Self {
        let (epsilon, bonus_scale) = match kind {
            AgentKind::EpsilonGreedy { epsilon } => (Some(epsilon), None),
            AgentKind::Ucbvi { bonus_scale } => (None, Some(bonus_scale)),
            _ => (None, None),
        };
        RawAgent {
            kind: kind.tag().to_string(),
            epsilon,
            bonus_scale,
        }
    }
}

fn check_bandit<F: Scalar>(belief: &BeliefState<F>) -> Result<()> {
    if belief.horizon() != 1 || belief.num_states() != 1 {
        return Err(Error::InvalidBelief(
            "bandit agents need a single-state, single-step belief".into(),
        ));
    }
    Ok(())
}

/// Draws one mean per arm from the posterior and plays the argmax.
pub fn thompson_bandit_step<F: Scalar, R: Rng + ?Sized>(belief: &BeliefState<F>, rng: &mut R) -> Result<usize> {
    check_bandit(belief)?;
    let draws: Vec<F> = (0..belief.actions())
        .map(|a| sampling::normal(rng, belief.posterior_mean(0, a), belief.posterior_var(0, a).sqrt()))
        .collect();
    Ok(sampling::argmax_random(rng, &draws))
}

/// UCB1-style index `m̂_a + σ sqrt(2 ln t / n_a)` on empirical means, ignoring
/// the prior; arms never pulled are played first.
pub fn ucb_bandit_step<F: Scalar, R: Rng + ?Sized>(belief: &BeliefState<F>, t: u64, rng: &mut R) -> Result<usize> {
    check_bandit(belief)?;
    if t == 0 {
        return Err(Error::ZeroEpisode);
    }
    let log_t = F::of((t as f64).ln());
    let two = F::of(2.0);
    let index: Vec<F> = (0..belief.actions())
        .map(|a| match belief.empirical_mean(0, a) {
            None => F::infinity(),
            Some(m) => m + belief.sigma() * (two * log_t / F::of(belief.count(0, a) as f64)).sqrt(),
        })
        .collect();
    Ok(sampling::argmax_random(rng, &index))
}

/// Posterior sampling: solve a sampled MDP and act greedily on it.
pub fn psrl_episode<F: Scalar, R: Rng + ?Sized>(belief: &BeliefState<F>, rng: &mut R) -> Policy<F> {
    let sample = belief.sample_mdp(rng);
    greedy_policy(&solve_optimal(&sample).q)
}

/// `scale · L · sqrt(ln(1 + t |X| A) / (n + 1))`.
pub fn ucbvi_bonus<F: Scalar>(belief: &BeliefState<F>, x: usize, a: usize, t: u64, scale: F) -> F {
    let pairs = (belief.num_states() * belief.actions()) as f64;
    let log_term = F::of((1.0 + t as f64 * pairs).ln());
    let n = F::of(belief.count(x, a) as f64);
    scale * F::of_usize(belief.horizon()) * (log_term / (n + F::one())).sqrt()
}

/// Optimistic backward induction on posterior-mean rewards plus bonus and
/// expected transitions. With `clip`, every Q-value is clamped to `[0, L]`
/// before it is propagated.
pub fn ucbvi_values<F: Scalar>(belief: &BeliefState<F>, t: u64, scale: F, clip: bool) -> ValueTables<F> {
    let layout = belief.layout().clone();
    let a_count = layout.actions();
    let upper = F::of_usize(layout.horizon());
    let mut reward = Table::zeros(layout.num_states(), a_count);
    for x in 0..layout.num_states() {
        for a in 0..a_count {
            reward.set(x, a, belief.posterior_mean(x, a) + ucbvi_bonus(belief, x, a, t, scale));
        }
    }
    if !clip {
        return backward(belief, &reward, |q, _| q.iter().copied().fold(F::neg_infinity(), F::max));
    }
    let mut q = Table::zeros(layout.num_states(), a_count);
    let mut v = vec![F::zero(); layout.num_states()];
    for l in (0..layout.horizon()).rev() {
        let next: Vec<F> = if l + 1 < layout.horizon() {
            v[layout.layer(l + 1)].to_vec()
        } else {
            Vec::new()
        };
        for x in layout.layer(l) {
            for a in 0..a_count {
                let cont = if next.is_empty() {
                    F::zero()
                } else {
                    belief.expect_next(x, a, &next)
                };
                q.set(x, a, (reward.get(x, a) + cont).max(F::zero()).min(upper));
            }
            v[x] = q.row(x).iter().copied().fold(F::neg_infinity(), F::max);
        }
    }
    ValueTables { q, v }
}

/// Greedy policy on the clipped UCBVI values.
pub fn ucbvi_episode<F: Scalar>(belief: &BeliefState<F>, t: u64, bonus_scale: F) -> Policy<F> {
    greedy_policy(&ucbvi_values(belief, t, bonus_scale, true).q)
}

/// `(1 - ε) greedy + ε uniform`, greedy on the posterior-mean MDP with ties
/// sharing the greedy mass.
pub fn epsilon_greedy_episode<F: Scalar>(belief: &BeliefState<F>, epsilon: F) -> Result<Policy<F>> {
    if !(epsilon >= F::zero() && epsilon <= F::one()) {
        return Err(Error::Config(format!("epsilon {epsilon} must lie in [0, 1]")));
    }
    let values = backward(belief, belief.posterior_means(), |q, _| {
        q.iter().copied().fold(F::neg_infinity(), F::max)
    });
    Ok(greedy_policy_uniform_ties(&values.q).mix_uniform(epsilon))
}
