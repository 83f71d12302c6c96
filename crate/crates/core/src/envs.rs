//! Experiment environments: DeepSea, Gaussian bandits, and MDPs drawn from a prior.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{BeliefPrior, BeliefState};
use crate::error::{Error, Result};
use crate::mdp::{solve_optimal, LayeredMdp, Layout, Table};
use crate::sampling;
use crate::Scalar;

pub const LEFT: usize = 0;
pub const RIGHT: usize = 1;

/// `L × L` grid descended one row per step; layer `l` is row `l`, its states are columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeepSeaSpec {
    pub size: usize,
    #[serde(default = "default_slip")]
    pub slip: f64,
    #[serde(default = "default_penalty")]
    pub right_penalty: f64,
    #[serde(default = "default_noise")]
    pub noise_std: f64,
}

fn default_slip() -> f64 {
    0.05
}

fn default_penalty() -> f64 {
    0.01
}

fn default_noise() -> f64 {
    1.0
}

impl DeepSeaSpec {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            slip: default_slip(),
            right_penalty: default_penalty(),
            noise_std: default_noise(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.size < 2 {
            return Err(Error::InvalidEnv(format!("DeepSea size {} must be at least 2", self.size)));
        }
        if !(0.0..0.5).contains(&self.slip) {
            return Err(Error::InvalidEnv(format!("slip {} must lie in [0, 0.5)", self.slip)));
        }
        if !(self.right_penalty > 0.0 && self.right_penalty.is_finite()) {
            return Err(Error::InvalidEnv(format!("right penalty {} must be positive", self.right_penalty)));
        }
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return Err(Error::InvalidEnv(format!("noise std {} must be positive", self.noise_std)));
        }
        Ok(())
    }
}

/// Builds DeepSea and checks by DP that moving right along the diagonal is optimal.
///
/// `left` moves down-left (clamped at column 0) with mean reward 0. `right`
/// moves down-right with probability `1 - p` and down-left otherwise, with
/// mean reward `-ε`; a right move from the second-to-last row also earns the
/// `+1` of the bottom-right cell in expectation, `(1 - p)` when it can land there.
pub fn build_deepsea<F: Scalar>(spec: &DeepSeaSpec) -> Result<LayeredMdp<F>> {
    spec.validate()?;
    let n = spec.size;
    let layout = Layout::new(vec![n; n], 2)?;
    let p = F::of(spec.slip);
    let eps = F::of(spec.right_penalty);
    let left_of = |c: usize| c.saturating_sub(1);
    let right_of = |c: usize| (c + 1).min(n - 1);
    let mut transition = Vec::with_capacity(n * n * 2);
    let mut reward = Table::zeros(n * n, 2);
    for row in 0..n {
        for col in 0..n {
            let x = layout.global(row, col);
            if row + 1 == n {
                transition.push(Vec::new());
                transition.push(Vec::new());
                reward.set(x, RIGHT, -eps);
                continue;
            }
            let mut left = vec![F::zero(); n];
            left[left_of(col)] = F::one();
            let mut right = vec![F::zero(); n];
            right[right_of(col)] += F::one() - p;
            right[left_of(col)] += p;
            let mut r = -eps;
            if row + 2 == n {
                r += right[n - 1];
            }
            reward.set(x, RIGHT, r);
            transition.push(left);
            transition.push(right);
        }
    }
    let mut rho = vec![F::zero(); n];
    rho[0] = F::one();
    let mdp = LayeredMdp::new(layout, transition, reward, F::of(spec.noise_std), rho)?;
    let q = solve_optimal(&mdp).q;
    for d in 0..n - 1 {
        let x = mdp.layout().global(d, d);
        if !(q.get(x, RIGHT) > q.get(x, LEFT)) {
            return Err(Error::InvalidEnv(format!(
                "moving right is not optimal at diagonal row {d} (p = {}, ε = {}); use a smaller slip or penalty",
                spec.slip, spec.right_penalty
            )));
        }
    }
    Ok(mdp)
}

/// Probability that the uniformly random policy ends an episode in the bottom-right cell.
pub fn deepsea_random_walk_success<F: Scalar>(mdp: &LayeredMdp<F>) -> F {
    let layout = mdp.layout();
    let n = layout.layer_sizes()[0];
    let half = F::of(0.5);
    let mut mass: Vec<F> = mdp.rho().to_vec();
    for l in 0..layout.horizon() - 1 {
        let mut next = vec![F::zero(); layout.layer_sizes()[l + 1]];
        for (i, x) in layout.layer(l).enumerate() {
            for a in 0..2 {
                for (j, &p) in mdp.transition_row(x, a).iter().enumerate() {
                    next[j] += half * mass[i] * p;
                }
            }
        }
        mass = next;
    }
    mass[n - 1]
}

/// Gaussian multi-armed bandit with an independent normal prior on each arm's mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditSpec {
    pub arms: usize,
    pub prior_means: Vec<f64>,
    pub prior_vars: Vec<f64>,
    pub noise_std: f64,
}

impl BanditSpec {
    /// Same `N(mean, var)` prior on every arm.
    pub fn iid(arms: usize, mean: f64, var: f64, noise_std: f64) -> Self {
        Self {
            arms,
            prior_means: vec![mean; arms],
            prior_vars: vec![var; arms],
            noise_std,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms == 0 {
            return Err(Error::InvalidEnv("a bandit needs at least one arm".into()));
        }
        if self.prior_means.len() != self.arms || self.prior_vars.len() != self.arms {
            return Err(Error::InvalidEnv(format!(
                "{} arms but {} prior means and {} prior variances",
                self.arms,
                self.prior_means.len(),
                self.prior_vars.len()
            )));
        }
        if self.prior_means.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidEnv("prior means must be finite".into()));
        }
        if self.prior_vars.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidEnv("prior variances must be nonnegative".into()));
        }
        if !(self.noise_std > 0.0 && self.noise_std.is_finite()) {
            return Err(Error::InvalidEnv(format!("noise std {} must be positive", self.noise_std)));
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<Layout> {
        Layout::new(vec![1], self.arms)
    }

    /// The spec's prior as a belief prior, likelihood noise included.
    pub fn prior<F: Scalar>(&self) -> Result<BeliefPrior<F>> {
        self.validate()?;
        let row = |v: &[f64]| Table::from_rows(&[v.iter().map(|&x| F::of(x)).collect()]);
        Ok(BeliefPrior {
            reward_mean: row(&self.prior_means)?,
            reward_var: row(&self.prior_vars)?,
            noise_var: F::of(self.noise_std * self.noise_std),
            dirichlet_alpha: F::one(),
        })
    }

    /// One draw of the arm means from the prior.
    pub fn sample_means<F: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<F> {
        self.prior_means
            .iter()
            .zip(&self.prior_vars)
            .map(|(&m, &v)| sampling::normal(rng, F::of(m), F::of(v.sqrt())))
            .collect()
    }
}

/// Single-state, single-step MDP with the given arm means.
pub fn build_bandit<F: Scalar>(spec: &BanditSpec, means: &[F]) -> Result<LayeredMdp<F>> {
    spec.validate()?;
    if means.len() != spec.arms {
        return Err(Error::InvalidEnv(format!("{} means for {} arms", means.len(), spec.arms)));
    }
    LayeredMdp::new(
        spec.layout()?,
        vec![Vec::new(); spec.arms],
        Table::from_rows(&[means.to_vec()])?,
        F::of(spec.noise_std),
        vec![F::one()],
    )
}

/// Draws arm means from the spec's prior and builds the bandit.
pub fn instantiate_bandit<F: Scalar, R: Rng + ?Sized>(spec: &BanditSpec, rng: &mut R) -> Result<LayeredMdp<F>> {
    spec.validate()?;
    let means = spec.sample_means(rng);
    build_bandit(spec, &means)
}

/// Draws a ground-truth MDP from the generative model a fresh belief describes.
pub fn sample_env_from_prior<F: Scalar, R: Rng + ?Sized>(prior: &BeliefState<F>, rng: &mut R) -> LayeredMdp<F> {
    prior.sample_mdp(rng)
}
