//! Conjugate posterior over a layered MDP: Gaussian posteriors on mean
//! rewards (known noise variance) and Dirichlet posteriors on transitions.
//!
//! The belief owns every cumulant generating function the K-learning
//! operator needs, including the transition-uncertainty inflation
//! `(L - l)² β² / (2 (n + 1))`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{Dynamics, LayeredMdp, Layout, Step, Table};
use crate::sampling;
use crate::Scalar;

/// Prior hyper-parameters, one reward prior per `(x, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefPrior<F> {
    pub reward_mean: Table<F>,
    pub reward_var: Table<F>,
    /// Variance of the observation noise assumed by the likelihood.
    pub noise_var: F,
    /// Dirichlet parameter given to every next-layer state.
    pub dirichlet_alpha: F,
}

impl<F: Scalar> BeliefPrior<F> {
    /// Same `N(mean, var)` reward prior everywhere, with `var` defaulting to
    /// the noise variance when `None`.
    pub fn uniform(layout: &Layout, mean: F, var: Option<F>, noise_var: F, dirichlet_alpha: F) -> Self {
        let (n, a) = (layout.num_states(), layout.actions());
        Self {
            reward_mean: Table::filled(n, a, mean),
            reward_var: Table::filled(n, a, var.unwrap_or(noise_var)),
            noise_var,
            dirichlet_alpha,
        }
    }
}

/// Posterior over an MDP's mean rewards and transitions given the history
/// before the current episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BeliefSnapshot<F>", into = "BeliefSnapshot<F>", bound = "F: Scalar")]
pub struct BeliefState<F: Scalar> {
    layout: Layout,
    rho: Vec<F>,
    prior_mean: Table<F>,
    prior_var: Table<F>,
    noise_var: F,
    reward_sum: Table<F>,
    counts: Vec<u64>,
    post_mean: Table<F>,
    post_var: Table<F>,
    alpha_prior: Vec<Vec<F>>,
    alpha: Vec<Vec<F>>,
    alpha_total: Vec<F>,
    episode: u64,
}

impl<F: Scalar> BeliefState<F> {
    /// Fresh belief at episode 1.
    ///
    /// Rejects priors whose variance exceeds the noise variance: with
    /// `v_0 ≤ σ²` the posterior variance after `n` observations is at most
    /// `σ²/(n+1)`, which the regret machinery relies on.
    pub fn new(layout: Layout, rho: Vec<F>, prior: &BeliefPrior<F>) -> Result<Self> {
        let (n, a_count) = (layout.num_states(), layout.actions());
        if prior.reward_mean.rows() != n
            || prior.reward_mean.cols() != a_count
            || prior.reward_var.rows() != n
            || prior.reward_var.cols() != a_count
        {
            return Err(Error::InvalidBelief("prior tables do not match the layout".into()));
        }
        if !(prior.noise_var > F::zero()) || !prior.noise_var.is_finite() {
            return Err(Error::InvalidBelief("noise variance must be positive".into()));
        }
        if !prior.reward_mean.all_finite() {
            return Err(Error::InvalidBelief("non-finite prior mean".into()));
        }
        for &v in prior.reward_var.as_slice() {
            if !(v >= F::zero()) || v > prior.noise_var {
                return Err(Error::InvalidBelief(format!(
                    "prior variance {v} must lie in [0, noise variance {}]",
                    prior.noise_var
                )));
            }
        }
        if !(prior.dirichlet_alpha > F::zero()) {
            return Err(Error::InvalidBelief("Dirichlet parameter must be positive".into()));
        }
        let alpha_prior: Vec<Vec<F>> = (0..n * a_count)
            .map(|i| vec![prior.dirichlet_alpha; layout.successors(i / a_count)])
            .collect();
        for (i, row) in alpha_prior.iter().enumerate() {
            let total: F = row.iter().copied().sum();
            if !row.is_empty() && total < F::one() {
                return Err(Error::InvalidBelief(format!(
                    "total Dirichlet pseudo-count {total} at pair {i} is below one"
                )));
            }
        }
        Self::assemble(
            layout,
            rho,
            prior.reward_mean.clone(),
            prior.reward_var.clone(),
            prior.noise_var,
            Table::zeros(n, a_count),
            vec![0; n * a_count],
            alpha_prior.clone(),
            alpha_prior,
            1,
        )
    }

    /// A belief that has (virtually) seen `pseudo_count` visits of every pair
    /// of `mdp` with zero reward uncertainty; expected dynamics equal `mdp`'s
    /// to machine precision.
    pub fn concentrated(mdp: &LayeredMdp<F>, pseudo_count: u64) -> Result<Self> {
        let layout = mdp.layout().clone();
        let (n, a_count) = (layout.num_states(), layout.actions());
        let c = F::of(pseudo_count as f64);
        let tiny = F::min_positive_value();
        let mut alpha_prior = Vec::with_capacity(n * a_count);
        let mut alpha = Vec::with_capacity(n * a_count);
        for x in 0..n {
            for a in 0..a_count {
                let row = mdp.transition_row(x, a);
                alpha_prior.push(vec![tiny; row.len()]);
                alpha.push(row.iter().map(|&p| tiny + c * p).collect());
            }
        }
        let mut reward_sum = mdp.mean_reward().clone();
        for x in 0..n {
            for v in reward_sum.row_mut(x) {
                *v *= c;
            }
        }
        let noise = mdp.reward_noise_std();
        let noise_var = if noise > F::zero() { noise * noise } else { F::one() };
        Self::assemble(
            layout,
            mdp.rho().to_vec(),
            mdp.mean_reward().clone(),
            Table::zeros(n, a_count),
            noise_var,
            reward_sum,
            vec![pseudo_count; n * a_count],
            alpha_prior,
            alpha,
            1,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        layout: Layout,
        rho: Vec<F>,
        prior_mean: Table<F>,
        prior_var: Table<F>,
        noise_var: F,
        reward_sum: Table<F>,
        counts: Vec<u64>,
        alpha_prior: Vec<Vec<F>>,
        alpha: Vec<Vec<F>>,
        episode: u64,
    ) -> Result<Self> {
        if rho.len() != layout.layer_sizes()[0] {
            return Err(Error::InvalidBelief("rho must cover the first layer".into()));
        }
        if episode == 0 {
            return Err(Error::ZeroEpisode);
        }
        let a_count = layout.actions();
        for (i, (row, prior_row)) in alpha.iter().zip(&alpha_prior).enumerate() {
            if row.len() != layout.successors(i / a_count) || prior_row.len() != row.len() {
                return Err(Error::InvalidBelief(format!("Dirichlet row {i} has the wrong length")));
            }
            if row.iter().any(|&v| !(v > F::zero())) {
                return Err(Error::InvalidBelief(format!("Dirichlet row {i} has a nonpositive entry")));
            }
        }
        let n = layout.num_states();
        let alpha_total = alpha.iter().map(|r| r.iter().copied().sum()).collect();
        let mut belief = Self {
            layout,
            rho,
            post_mean: prior_mean.clone(),
            post_var: prior_var.clone(),
            prior_mean,
            prior_var,
            noise_var,
            reward_sum,
            counts,
            alpha_prior,
            alpha,
            alpha_total,
            episode,
        };
        for x in 0..n {
            for a in 0..a_count {
                belief.refresh_reward(x, a);
            }
        }
        Ok(belief)
    }

    /// Recomputes the posterior of `(x, a)` from its sufficient statistics.
    fn refresh_reward(&mut self, x: usize, a: usize) {
        let v0 = self.prior_var.get(x, a);
        let m0 = self.prior_mean.get(x, a);
        let n = F::of(self.count(x, a) as f64);
        let (m, v) = if v0 > F::zero() {
            let v = F::one() / (F::one() / v0 + n / self.noise_var);
            (v * (m0 / v0 + self.reward_sum.get(x, a) / self.noise_var), v)
        } else {
            (m0, F::zero())
        };
        self.post_mean.set(x, a, m);
        self.post_var.set(x, a, v);
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn horizon(&self) -> usize {
        self.layout.horizon()
    }

    pub fn actions(&self) -> usize {
        self.layout.actions()
    }

    pub fn num_states(&self) -> usize {
        self.layout.num_states()
    }

    pub fn rho(&self) -> &[F] {
        &self.rho
    }

    /// Episode index `t ≥ 1` whose policy this belief will produce.
    pub fn episode(&self) -> u64 {
        self.episode
    }

    pub fn noise_var(&self) -> F {
        self.noise_var
    }

    /// Sub-Gaussian scale `σ` of the reward posteriors.
    pub fn sigma(&self) -> F {
        self.noise_var.sqrt()
    }

    /// `n_{s,a}`: visits before the current episode.
    pub fn count(&self, x: usize, a: usize) -> u64 {
        self.counts[x * self.actions() + a]
    }

    pub fn posterior_mean(&self, x: usize, a: usize) -> F {
        self.post_mean.get(x, a)
    }

    pub fn posterior_var(&self, x: usize, a: usize) -> F {
        self.post_var.get(x, a)
    }

    pub fn posterior_means(&self) -> &Table<F> {
        &self.post_mean
    }

    /// Sample mean of observed rewards, ignoring the prior; `None` before any visit.
    pub fn empirical_mean(&self, x: usize, a: usize) -> Option<F> {
        let n = self.count(x, a);
        (n > 0).then(|| self.reward_sum.get(x, a) / F::of(n as f64))
    }

    pub fn alpha(&self, x: usize, a: usize) -> &[F] {
        &self.alpha[x * self.actions() + a]
    }

    /// Observed successor counts `α - α_prior`.
    pub fn transition_counts(&self, x: usize, a: usize) -> Vec<F> {
        let i = x * self.actions() + a;
        self.alpha[i]
            .iter()
            .zip(&self.alpha_prior[i])
            .map(|(&p, &q)| p - q)
            .collect()
    }

    /// Conjugate update of the reward posterior at `(x, a)`.
    pub fn update_reward(&mut self, x: usize, a: usize, reward: F) -> Result<()> {
        self.update_reward_batch(x, a, &[reward])
    }

    pub fn update_reward_batch(&mut self, x: usize, a: usize, rewards: &[F]) -> Result<()> {
        self.check_pair(x, a)?;
        if let Some(r) = rewards.iter().find(|r| !r.is_finite()) {
            return Err(Error::InvalidObservation(format!("non-finite reward {r}")));
        }
        let i = x * self.actions() + a;
        let sum: F = rewards.iter().copied().sum();
        self.reward_sum.set(x, a, self.reward_sum.get(x, a) + sum);
        self.counts[i] += rewards.len() as u64;
        self.refresh_reward(x, a);
        Ok(())
    }

    /// Dirichlet update for an observed transition `(x, a) → next` (global index).
    pub fn update_transition(&mut self, x: usize, a: usize, next: usize) -> Result<()> {
        self.check_pair(x, a)?;
        let l = self.layout.layer_of(x);
        if next >= self.num_states() || self.layout.layer_of(next) != l + 1 {
            return Err(Error::InvalidObservation(format!(
                "state {next} is not in the layer after state {x}"
            )));
        }
        let i = x * self.actions() + a;
        self.alpha[i][self.layout.local(next)] += F::one();
        self.alpha_total[i] += F::one();
        Ok(())
    }

    /// Folds a simulated episode into the posterior and advances `t`.
    pub fn observe_episode(&mut self, steps: &[Step<F>]) -> Result<()> {
        for step in steps {
            self.update_reward(step.state, step.action, step.reward)?;
            if let Some(next) = step.next {
                self.update_transition(step.state, step.action, next)?;
            }
        }
        self.episode += 1;
        Ok(())
    }

    fn check_pair(&self, x: usize, a: usize) -> Result<()> {
        if x >= self.num_states() || a >= self.actions() {
            return Err(Error::InvalidObservation(format!("pair ({x}, {a}) out of range")));
        }
        Ok(())
    }

    /// Gaussian posterior CGF `G(β) = m β + v β² / 2`.
    #[inline]
    pub fn reward_cgf(&self, x: usize, a: usize, beta: F) -> F {
        let half = F::of(0.5);
        self.posterior_mean(x, a) * beta + half * self.posterior_var(x, a) * beta * beta
    }

    /// `(L - l)² / (n + 1)` with `l` the 1-based time-step of `x`.
    #[inline]
    pub fn transition_bonus_weight(&self, x: usize, a: usize) -> F {
        let remaining = F::of_usize(self.horizon() - 1 - self.layout.layer_of(x));
        remaining * remaining / (F::of(self.count(x, a) as f64) + F::one())
    }

    /// Inflated CGF `G(β) + (L - l)² β² / (2 (n + 1))` for `β ≥ 0`.
    pub fn inflated_cgf(&self, x: usize, a: usize, beta: F) -> Result<F> {
        if beta < F::zero() {
            return Err(Error::NegativeBeta(beta.as_f64()));
        }
        Ok(self.inflated_cgf_unchecked(x, a, beta))
    }

    /// `τ G̃(1/τ) = m + (v + w) / (2τ)`, formed without the `τ · (m/τ)` round trip.
    #[inline]
    pub(crate) fn scaled_inflated_cgf(&self, x: usize, a: usize, tau: F) -> F {
        let spread = self.posterior_var(x, a) + self.transition_bonus_weight(x, a);
        self.posterior_mean(x, a) + F::of(0.5) * spread / tau
    }

    #[inline]
    pub(crate) fn inflated_cgf_unchecked(&self, x: usize, a: usize, beta: F) -> F {
        self.reward_cgf(x, a, beta) + F::of(0.5) * self.transition_bonus_weight(x, a) * beta * beta
    }

    /// Posterior mean of the successor distribution, `α / Σα`.
    pub fn expected_transition(&self, x: usize, a: usize) -> Vec<F> {
        let i = x * self.actions() + a;
        self.alpha[i].iter().map(|&v| v / self.alpha_total[i]).collect()
    }

    /// The MDP with posterior-mean rewards and expected transitions.
    pub fn expected_mdp(&self) -> Result<LayeredMdp<F>> {
        let n = self.num_states();
        let a_count = self.actions();
        let transition = (0..n * a_count)
            .map(|i| self.expected_transition(i / a_count, i % a_count))
            .collect();
        LayeredMdp::new(
            self.layout.clone(),
            transition,
            self.post_mean.clone(),
            self.sigma(),
            self.rho.clone(),
        )
    }

    /// Draws an MDP from the posterior.
    pub fn sample_mdp<R: Rng + ?Sized>(&self, rng: &mut R) -> LayeredMdp<F> {
        let n = self.num_states();
        let a_count = self.actions();
        let mut mean = Table::zeros(n, a_count);
        for x in 0..n {
            for a in 0..a_count {
                let std = self.posterior_var(x, a).sqrt();
                mean.set(x, a, sampling::normal(rng, self.posterior_mean(x, a), std));
            }
        }
        let transition = self
            .alpha
            .iter()
            .map(|alpha| {
                if alpha.is_empty() {
                    Vec::new()
                } else {
                    sampling::dirichlet(rng, alpha)
                }
            })
            .collect();
        LayeredMdp::new(self.layout.clone(), transition, mean, self.sigma(), self.rho.clone())
            .expect("posterior samples are valid MDPs")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl<F: Scalar> Dynamics<F> for BeliefState<F> {
    fn layout(&self) -> &Layout {
        &self.layout
    }

    #[inline]
    fn expect_next(&self, x: usize, a: usize, next: &[F]) -> F {
        let i = x * self.actions() + a;
        let dot: F = self.alpha[i].iter().zip(next).map(|(&p, &v)| p * v).sum();
        dot / self.alpha_total[i]
    }

    fn spread_next(&self, x: usize, a: usize, weight: F, acc: &mut [F]) {
        let i = x * self.actions() + a;
        let scale = weight / self.alpha_total[i];
        for (slot, &p) in acc.iter_mut().zip(&self.alpha[i]) {
            *slot += scale * p;
        }
    }
}

/// Checkpoint form of [`BeliefState`]; per-pair vectors are flat in
/// `x * A + a` order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct BeliefSnapshot<F> {
    pub layer_sizes: Vec<usize>,
    #[serde(rename = "A")]
    pub actions: usize,
    pub rho: Vec<F>,
    pub prior_mean: Vec<F>,
    pub prior_var: Vec<F>,
    pub noise_var: F,
    pub reward_sum: Vec<F>,
    pub counts: Vec<u64>,
    pub alpha_prior: Vec<Vec<F>>,
    pub alpha: Vec<Vec<F>>,
    pub episode: u64,
}

impl<F: Scalar> From<BeliefState<F>> for BeliefSnapshot<F> {
    fn from(b: BeliefState<F>) -> Self {
        Self {
            layer_sizes: b.layout.layer_sizes().to_vec(),
            actions: b.layout.actions(),
            rho: b.rho,
            prior_mean: b.prior_mean.as_slice().to_vec(),
            prior_var: b.prior_var.as_slice().to_vec(),
            noise_var: b.noise_var,
            reward_sum: b.reward_sum.as_slice().to_vec(),
            counts: b.counts,
            alpha_prior: b.alpha_prior,
            alpha: b.alpha,
            episode: b.episode,
        }
    }
}

impl<F: Scalar> TryFrom<BeliefSnapshot<F>> for BeliefState<F> {
    type Error = Error;

    fn try_from(s: BeliefSnapshot<F>) -> Result<Self> {
        let layout = Layout::new(s.layer_sizes, s.actions)?;
        let (n, a) = (layout.num_states(), layout.actions());
        let table = |v: Vec<F>, what: &str| -> Result<Table<F>> {
            if v.len() != n * a {
                return Err(Error::InvalidBelief(format!("{what} has {} entries, expected {}", v.len(), n * a)));
            }
            Table::from_rows(&v.chunks(a).map(<[F]>::to_vec).collect::<Vec<_>>())
        };
        if s.counts.len() != n * a || s.alpha.len() != n * a || s.alpha_prior.len() != n * a {
            return Err(Error::InvalidBelief("per-pair arrays have the wrong length".into()));
        }
        Self::assemble(
            layout,
            s.rho,
            table(s.prior_mean, "prior_mean")?,
            table(s.prior_var, "prior_var")?,
            s.noise_var,
            table(s.reward_sum, "reward_sum")?,
            s.counts,
            s.alpha_prior,
            s.alpha,
            s.episode,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bandit(arms: usize, mean: f64, var: f64, noise_var: f64) -> BeliefState<f64> {
        let layout = Layout::new(vec![1], arms).unwrap();
        let prior = BeliefPrior::uniform(&layout, mean, Some(var), noise_var, 1.0);
        BeliefState::new(layout, vec![1.0], &prior).unwrap()
    }

    fn two_layer() -> BeliefState<f64> {
        let layout = Layout::new(vec![1, 2], 2).unwrap();
        let prior = BeliefPrior::uniform(&layout, 0.0, None, 1.0, 1.0);
        BeliefState::new(layout, vec![1.0], &prior).unwrap()
    }

    #[test]
    fn single_observation_closed_form() {
        let mut b = bandit(1, 0.0, 1.0, 1.0);
        assert_eq!(b.posterior_var(0, 0), 1.0);
        b.update_reward(0, 0, 1.0).unwrap();
        assert_relative_eq!(b.posterior_mean(0, 0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(b.posterior_var(0, 0), 0.5, epsilon = 1e-15);
        assert_eq!(b.count(0, 0), 1);
    }

    #[test]
    fn prior_mean_evidence_keeps_mean_and_shrinks_variance() {
        let sigma2 = 0.3;
        let mut b = bandit(1, 0.7, sigma2, sigma2);
        for n in 1..=50u32 {
            b.update_reward(0, 0, 0.7).unwrap();
            assert_relative_eq!(b.posterior_mean(0, 0), 0.7, epsilon = 1e-12);
            assert_relative_eq!(b.posterior_var(0, 0), sigma2 / f64::from(n + 1), max_relative = 1e-14);
        }
    }

    #[test]
    fn rejects_nonfinite_rewards_and_bad_transitions() {
        let mut b = two_layer();
        assert!(b.update_reward(0, 0, f64::NAN).is_err());
        assert!(b.update_transition(0, 0, 0).is_err());
        assert!(b.update_transition(1, 0, 2).is_err());
        b.update_transition(0, 1, 1).unwrap();
        assert_eq!(b.alpha(0, 1), &[2.0, 1.0]);
        assert_eq!(b.expected_transition(0, 1), vec![2.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn repeated_successor_mass() {
        let mut b = two_layer();
        for k in 1..=10 {
            b.update_transition(0, 0, 2).unwrap();
            let p = b.expected_transition(0, 0);
            assert_relative_eq!(p[1], (1.0 + k as f64) / (2.0 + k as f64), epsilon = 1e-15);
        }
        assert_eq!(b.transition_counts(0, 0), vec![0.0, 10.0]);
    }

    #[test]
    fn expected_transition_of_skewed_alpha() {
        let mut b = two_layer();
        b.update_transition(0, 0, 1).unwrap();
        b.update_transition(0, 0, 1).unwrap();
        assert_eq!(b.expected_transition(0, 0), vec![0.75, 0.25]);
        assert_eq!(b.expected_transition(0, 1), vec![0.5, 0.5]);
    }

    #[test]
    fn cgf_values() {
        let b = bandit(1, 0.0, 1.0, 1.0);
        assert_eq!(b.reward_cgf(0, 0, 1.0), 0.5);
        assert_eq!(b.reward_cgf(0, 0, 0.0), 0.0);
        assert_eq!(b.inflated_cgf(0, 0, 1.0).unwrap(), 0.5);
        assert!(matches!(b.inflated_cgf(0, 0, -1.0), Err(Error::NegativeBeta(_))));
    }

    #[test]
    fn inflation_bonus_formula() {
        let layout = Layout::new(vec![1, 1, 1], 1).unwrap();
        let prior = BeliefPrior::uniform(&layout, 0.0, None, 1.0, 1.0);
        let mut b = BeliefState::new(layout, vec![1.0], &prior).unwrap();
        // first layer, L - l = 2, n = 0
        assert_eq!(b.inflated_cgf(0, 0, 1.0).unwrap() - b.reward_cgf(0, 0, 1.0), 2.0);
        // final layer has no bonus
        assert_eq!(b.inflated_cgf(2, 0, 1.0).unwrap(), b.reward_cgf(2, 0, 1.0));
        b.update_reward(0, 0, 0.0).unwrap();
        assert_eq!(b.inflated_cgf(0, 0, 1.0).unwrap() - b.reward_cgf(0, 0, 1.0), 1.0);
    }

    #[test]
    fn rejects_prior_wider_than_noise() {
        let layout = Layout::new(vec![1], 2).unwrap();
        let prior = BeliefPrior::uniform(&layout, 0.0, Some(2.0), 1.0, 1.0);
        assert!(BeliefState::new(layout, vec![1.0], &prior).is_err());
    }

    #[test]
    fn rejects_pseudo_count_below_one() {
        let layout = Layout::new(vec![1, 2], 1).unwrap();
        let prior = BeliefPrior::uniform(&layout, 0.0, None, 1.0, 0.25);
        assert!(BeliefState::new(layout, vec![1.0], &prior).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let mut b = two_layer();
        b.update_reward(0, 1, 0.123456789).unwrap();
        b.update_transition(0, 1, 2).unwrap();
        b.observe_episode(&[]).unwrap();
        let text = b.to_json().unwrap();
        let back = BeliefState::<f64>::from_json(&text).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.episode(), 2);
    }

    #[test]
    fn empirical_mean_ignores_prior() {
        let mut b = bandit(2, 3.0, 1.0, 1.0);
        assert_eq!(b.empirical_mean(0, 0), None);
        b.update_reward(0, 0, 1.0).unwrap();
        assert_eq!(b.empirical_mean(0, 0), Some(1.0));
        assert_relative_eq!(b.posterior_mean(0, 0), 2.0, epsilon = 1e-15);
    }
}
