//! Finite-horizon MDPs as layered DAGs, exact dynamic programming, policy
//! evaluation and occupancy measures.
//!
//! States are addressed by a flat global index derived from
//! `(layer, index-within-layer)`; see [`Layout`]. Layers are 0-based in code,
//! so layer `l` here is time-step `l + 1` of the episode. The terminal values
//! `Q_{L+1} = 0` are the base case of every backward recursion and are never
//! stored.

use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling;
use crate::Scalar;

/// Partition of the global state space into time layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    layer_sizes: Vec<usize>,
    offsets: Vec<usize>,
    layer_of: Vec<usize>,
    actions: usize,
}

impl Layout {
    pub fn new(layer_sizes: Vec<usize>, actions: usize) -> Result<Self> {
        if layer_sizes.is_empty() {
            return Err(Error::InvalidMdp("horizon must be at least 1".into()));
        }
        if layer_sizes.iter().any(|&n| n == 0) {
            return Err(Error::InvalidMdp("every layer needs at least one state".into()));
        }
        if actions == 0 {
            return Err(Error::InvalidMdp("need at least one action".into()));
        }
        let mut offsets = Vec::with_capacity(layer_sizes.len() + 1);
        let mut layer_of = Vec::new();
        let mut acc = 0;
        for (l, &n) in layer_sizes.iter().enumerate() {
            offsets.push(acc);
            layer_of.extend(std::iter::repeat_n(l, n));
            acc += n;
        }
        offsets.push(acc);
        Ok(Self {
            layer_sizes,
            offsets,
            layer_of,
            actions,
        })
    }

    /// Episode length `L`.
    pub fn horizon(&self) -> usize {
        self.layer_sizes.len()
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    /// `|X| = Σ_l |S_l|`.
    pub fn num_states(&self) -> usize {
        self.offsets[self.horizon()]
    }

    /// Global indices of the states in layer `l`.
    pub fn layer(&self, l: usize) -> Range<usize> {
        self.offsets[l]..self.offsets[l + 1]
    }

    pub fn layer_of(&self, x: usize) -> usize {
        self.layer_of[x]
    }

    pub fn global(&self, l: usize, i: usize) -> usize {
        self.offsets[l] + i
    }

    pub fn local(&self, x: usize) -> usize {
        x - self.offsets[self.layer_of[x]]
    }

    pub fn is_final(&self, x: usize) -> bool {
        self.layer_of[x] + 1 == self.horizon()
    }

    /// Number of successor states of `x` (zero in the final layer).
    pub fn successors(&self, x: usize) -> usize {
        let l = self.layer_of[x];
        if l + 1 == self.horizon() {
            0
        } else {
            self.layer_sizes[l + 1]
        }
    }
}

/// Dense row-major `states × actions` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Table<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Table<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, F::zero())
    }

    pub fn filled(rows: usize, cols: usize, value: F) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMdp("ragged table rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> F {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [F] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> F {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(F::zero(), F::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// A stochastic policy: one action distribution per global state.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy<F> {
    probs: Table<F>,
}

impl<F: Scalar> Policy<F> {
    /// Validates every row as a probability vector.
    pub fn new(probs: Table<F>) -> Result<Self> {
        let tol = F::stochastic_tol();
        for s in 0..probs.rows() {
            let row = probs.row(s);
            if row.iter().any(|&p| p < F::zero() || !p.is_finite()) {
                return Err(Error::PolicyMismatch(format!("negative or non-finite entry at state {s}")));
            }
            let total: F = row.iter().copied().sum();
            if (total - F::one()).abs() > tol {
                return Err(Error::PolicyMismatch(format!("row {s} sums to {total}")));
            }
        }
        Ok(Self { probs })
    }

    pub(crate) fn from_table_unchecked(probs: Table<F>) -> Self {
        Self { probs }
    }

    pub fn uniform(states: usize, actions: usize) -> Self {
        Self {
            probs: Table::filled(states, actions, F::one() / F::of_usize(actions)),
        }
    }

    /// Point mass on `actions_by_state[s]` at each state.
    pub fn deterministic(actions_by_state: &[usize], actions: usize) -> Self {
        let mut probs = Table::zeros(actions_by_state.len(), actions);
        for (s, &a) in actions_by_state.iter().enumerate() {
            probs.set(s, a, F::one());
        }
        Self { probs }
    }

    /// `(1 - ε) π + ε · uniform`.
    pub fn mix_uniform(&self, eps: F) -> Self {
        let a = F::of_usize(self.actions());
        let mut probs = self.probs.clone();
        for s in 0..probs.rows() {
            for p in probs.row_mut(s) {
                *p = (F::one() - eps) * *p + eps / a;
            }
        }
        Self { probs }
    }

    pub fn states(&self) -> usize {
        self.probs.rows()
    }

    pub fn actions(&self) -> usize {
        self.probs.cols()
    }

    pub fn row(&self, s: usize) -> &[F] {
        self.probs.row(s)
    }

    pub fn prob(&self, s: usize, a: usize) -> F {
        self.probs.get(s, a)
    }

    pub fn table(&self) -> &Table<F> {
        &self.probs
    }

    pub fn sample_action<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> usize {
        sampling::categorical(rng, self.row(s))
    }
}

/// Q- and V-tables over the global state space.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTables<F> {
    pub q: Table<F>,
    pub v: Vec<F>,
}

/// Per-layer state-action visitation distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMeasure<F> {
    layout: Layout,
    lambda: Table<F>,
}

impl<F: Scalar> OccupancyMeasure<F> {
    pub fn lambda(&self) -> &Table<F> {
        &self.lambda
    }

    pub fn get(&self, x: usize, a: usize) -> F {
        self.lambda.get(x, a)
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// `Σ_{s ∈ S_l, a} λ[s, a]`.
    pub fn layer_mass(&self, l: usize) -> F {
        self.layout
            .layer(l)
            .map(|x| self.lambda.row(x).iter().copied().sum::<F>())
            .sum()
    }

    /// State marginal `Σ_a λ[x, a]`.
    pub fn state_mass(&self, x: usize) -> F {
        self.lambda.row(x).iter().copied().sum()
    }

    /// Policy induced by the measure, `λ_x / Σ_b λ_{x,b}`; `None` for unvisited states.
    pub fn induced_policy_row(&self, x: usize) -> Option<Vec<F>> {
        let mass = self.state_mass(x);
        (mass > F::zero()).then(|| self.lambda.row(x).iter().map(|&l| l / mass).collect())
    }

    /// Largest violation of the initial-distribution and flow-conservation
    /// constraints under `dynamics`.
    pub fn flow_residual<D: Dynamics<F> + ?Sized>(&self, dynamics: &D, rho: &[F]) -> F {
        let layout = &self.layout;
        let mut worst = F::zero();
        for (i, x) in layout.layer(0).enumerate() {
            worst = worst.max((self.state_mass(x) - rho[i]).abs());
        }
        for l in 0..layout.horizon() - 1 {
            let mut inflow = vec![F::zero(); layout.layer_sizes()[l + 1]];
            for x in layout.layer(l) {
                for a in 0..layout.actions() {
                    dynamics.spread_next(x, a, self.lambda.get(x, a), &mut inflow);
                }
            }
            for (i, x) in layout.layer(l + 1).enumerate() {
                worst = worst.max((self.state_mass(x) - inflow[i]).abs());
            }
        }
        worst
    }
}

/// Layer-to-layer transition structure shared by true MDPs and beliefs.
pub trait Dynamics<F: Scalar> {
    fn layout(&self) -> &Layout;

    /// `Σ_{s'} P[s' | x, a] next[s']`, with `next` indexed within layer `l + 1`.
    fn expect_next(&self, x: usize, a: usize, next: &[F]) -> F;

    /// Adds `weight · P[· | x, a]` into `acc` (indexed within layer `l + 1`).
    fn spread_next(&self, x: usize, a: usize, weight: F, acc: &mut [F]);
}

/// Ground-truth finite-horizon MDP whose states form a layered DAG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MdpDocument<F>", into = "MdpDocument<F>", bound = "F: Scalar")]
pub struct LayeredMdp<F: Scalar> {
    layout: Layout,
    /// `transition[x * A + a]` is the successor distribution over layer `l + 1`;
    /// empty in the final layer.
    transition: Vec<Vec<F>>,
    mean_reward: Table<F>,
    reward_noise_std: F,
    rho: Vec<F>,
    bounded_rewards: bool,
}

impl<F: Scalar> LayeredMdp<F> {
    /// Builds and validates an MDP from flat per-`(x, a)` transition rows.
    pub fn new(
        layout: Layout,
        transition: Vec<Vec<F>>,
        mean_reward: Table<F>,
        reward_noise_std: F,
        rho: Vec<F>,
    ) -> Result<Self> {
        let mdp = Self {
            layout,
            transition,
            mean_reward,
            reward_noise_std,
            rho,
            bounded_rewards: false,
        };
        mdp.validate()?;
        Ok(mdp)
    }

    /// Marks mean rewards as required to lie in `[0, 1]` and re-validates.
    pub fn with_bounded_rewards(mut self, bounded: bool) -> Result<Self> {
        self.bounded_rewards = bounded;
        self.validate()?;
        Ok(self)
    }

    /// Replaces the reward noise scale, e.g. to simulate a misspecified likelihood.
    pub fn with_reward_noise_std(mut self, std: F) -> Result<Self> {
        self.reward_noise_std = std;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let layout = &self.layout;
        let (n, a_count) = (layout.num_states(), layout.actions());
        let tol = F::stochastic_tol();
        if self.transition.len() != n * a_count {
            return Err(Error::InvalidMdp(format!(
                "expected {} transition rows, got {}",
                n * a_count,
                self.transition.len()
            )));
        }
        if self.mean_reward.rows() != n || self.mean_reward.cols() != a_count {
            return Err(Error::InvalidMdp("mean reward table has the wrong shape".into()));
        }
        if !self.mean_reward.all_finite() {
            return Err(Error::InvalidMdp("non-finite mean reward".into()));
        }
        if self.bounded_rewards
            && self.mean_reward.as_slice().iter().any(|&m| m < F::zero() || m > F::one())
        {
            return Err(Error::InvalidMdp("mean rewards must lie in [0, 1]".into()));
        }
        if !(self.reward_noise_std >= F::zero()) || !self.reward_noise_std.is_finite() {
            return Err(Error::InvalidMdp("reward noise std must be nonnegative".into()));
        }
        check_distribution(&self.rho, tol).map_err(|reason| Error::InvalidMdp(format!("rho {reason}")))?;
        if self.rho.len() != layout.layer_sizes()[0] {
            return Err(Error::InvalidMdp("rho must cover the first layer".into()));
        }
        for x in 0..n {
            for a in 0..a_count {
                let row = &self.transition[x * a_count + a];
                if row.len() != layout.successors(x) {
                    return Err(Error::NonStochasticRow {
                        state: x,
                        action: a,
                        reason: format!("expected {} successors, got {}", layout.successors(x), row.len()),
                    });
                }
                if layout.successors(x) > 0 {
                    check_distribution(row, tol).map_err(|reason| Error::NonStochasticRow {
                        state: x,
                        action: a,
                        reason,
                    })?;
                }
            }
        }
        Ok(())
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

    pub fn transition_row(&self, x: usize, a: usize) -> &[F] {
        &self.transition[x * self.actions() + a]
    }

    pub fn mean_reward(&self) -> &Table<F> {
        &self.mean_reward
    }

    pub fn reward_noise_std(&self) -> F {
        self.reward_noise_std
    }

    pub fn rho(&self) -> &[F] {
        &self.rho
    }

    pub fn bounded_rewards(&self) -> bool {
        self.bounded_rewards
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Simulates one episode under `policy` with Gaussian reward noise.
    pub fn rollout<R: Rng + ?Sized>(&self, policy: &Policy<F>, rng: &mut R) -> Vec<Step<F>> {
        let mut steps = Vec::with_capacity(self.horizon());
        let mut x = self.layout.global(0, sampling::categorical(rng, &self.rho));
        loop {
            let a = policy.sample_action(x, rng);
            let reward = sampling::normal(rng, self.mean_reward.get(x, a), self.reward_noise_std);
            let next = if self.layout.is_final(x) {
                None
            } else {
                let l = self.layout.layer_of(x);
                let j = sampling::categorical(rng, self.transition_row(x, a));
                Some(self.layout.global(l + 1, j))
            };
            steps.push(Step {
                state: x,
                action: a,
                reward,
                next,
            });
            match next {
                Some(n) => x = n,
                None => return steps,
            }
        }
    }
}

/// One transition of a simulated episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<F> {
    pub state: usize,
    pub action: usize,
    pub reward: F,
    /// Global index of the successor, `None` after the final layer.
    pub next: Option<usize>,
}

impl<F: Scalar> Dynamics<F> for LayeredMdp<F> {
    fn layout(&self) -> &Layout {
        &self.layout
    }

    #[inline]
    fn expect_next(&self, x: usize, a: usize, next: &[F]) -> F {
        self.transition_row(x, a)
            .iter()
            .zip(next)
            .map(|(&p, &v)| p * v)
            .sum()
    }

    fn spread_next(&self, x: usize, a: usize, weight: F, acc: &mut [F]) {
        for (slot, &p) in acc.iter_mut().zip(self.transition_row(x, a)) {
            *slot += weight * p;
        }
    }
}

fn check_distribution<F: Scalar>(row: &[F], tol: F) -> std::result::Result<(), String> {
    if row.iter().any(|&p| !(p >= F::zero() && p <= F::one())) {
        return Err("has entries outside [0, 1]".into());
    }
    let total: F = row.iter().copied().sum();
    if (total - F::one()).abs() > tol {
        return Err(format!("sums to {total}"));
    }
    Ok(())
}

/// JSON form of [`LayeredMdp`]; nested arrays are indexed by layer first.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct MdpDocument<F> {
    #[serde(rename = "L")]
    pub horizon: usize,
    pub layer_sizes: Vec<usize>,
    #[serde(rename = "A")]
    pub actions: usize,
    /// `transition[l][s][a][s']` for `l < L - 1`.
    pub transition: Vec<Vec<Vec<Vec<F>>>>,
    /// `mean_reward[l][s][a]`.
    pub mean_reward: Vec<Vec<Vec<F>>>,
    pub reward_noise_std: F,
    pub rho: Vec<F>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub bounded_rewards: bool,
}

impl<F: Scalar> TryFrom<MdpDocument<F>> for LayeredMdp<F> {
    type Error = Error;

    fn try_from(doc: MdpDocument<F>) -> Result<Self> {
        if doc.horizon != doc.layer_sizes.len() {
            return Err(Error::InvalidMdp(format!(
                "L = {} but {} layer sizes given",
                doc.horizon,
                doc.layer_sizes.len()
            )));
        }
        let layout = Layout::new(doc.layer_sizes, doc.actions)?;
        if doc.transition.len() != layout.horizon() - 1 || doc.mean_reward.len() != layout.horizon() {
            return Err(Error::InvalidMdp("per-layer arrays have the wrong length".into()));
        }
        let mut transition = Vec::with_capacity(layout.num_states() * layout.actions());
        let mut rewards = Vec::with_capacity(layout.num_states());
        for l in 0..layout.horizon() {
            let size = layout.layer_sizes()[l];
            if doc.mean_reward[l].len() != size {
                return Err(Error::InvalidMdp(format!("layer {l} reward rows: expected {size}")));
            }
            rewards.extend(doc.mean_reward[l].iter().cloned());
            for s in 0..size {
                for a in 0..layout.actions() {
                    if l + 1 < layout.horizon() {
                        let row = doc.transition[l]
                            .get(s)
                            .and_then(|per_action| per_action.get(a))
                            .ok_or_else(|| Error::InvalidMdp(format!("missing transition row ({l}, {s}, {a})")))?;
                        transition.push(row.clone());
                    } else {
                        transition.push(Vec::new());
                    }
                }
            }
        }
        let mdp = LayeredMdp::new(
            layout,
            transition,
            Table::from_rows(&rewards)?,
            doc.reward_noise_std,
            doc.rho,
        )?;
        mdp.with_bounded_rewards(doc.bounded_rewards)
    }
}

impl<F: Scalar> From<LayeredMdp<F>> for MdpDocument<F> {
    fn from(mdp: LayeredMdp<F>) -> Self {
        let layout = &mdp.layout;
        let a_count = layout.actions();
        let transition = (0..layout.horizon() - 1)
            .map(|l| {
                layout
                    .layer(l)
                    .map(|x| (0..a_count).map(|a| mdp.transition_row(x, a).to_vec()).collect())
                    .collect()
            })
            .collect();
        let mean_reward = (0..layout.horizon())
            .map(|l| layout.layer(l).map(|x| mdp.mean_reward.row(x).to_vec()).collect())
            .collect();
        MdpDocument {
            horizon: layout.horizon(),
            layer_sizes: layout.layer_sizes().to_vec(),
            actions: a_count,
            transition,
            mean_reward,
            reward_noise_std: mdp.reward_noise_std,
            rho: mdp.rho,
            bounded_rewards: mdp.bounded_rewards,
        }
    }
}

/// A stationary finite MDP over `S` states, before unrolling over time.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryMdp<F> {
    /// `transition[s][a][s']`.
    pub transition: Vec<Vec<Vec<F>>>,
    /// `mean_reward[s][a]`.
    pub mean_reward: Vec<Vec<F>>,
    pub rho: Vec<F>,
    pub reward_noise_std: F,
}

/// Replaces every state by `horizon` time-indexed copies, giving a layered
/// DAG with `|X| = L·S` states.
pub fn unroll<F: Scalar>(base: &StationaryMdp<F>, horizon: usize) -> Result<LayeredMdp<F>> {
    let s_count = base.transition.len();
    if horizon == 0 {
        return Err(Error::InvalidMdp("horizon must be at least 1".into()));
    }
    if s_count == 0 || base.mean_reward.len() != s_count {
        return Err(Error::InvalidMdp("transition and reward tables disagree on S".into()));
    }
    let a_count = base.transition[0].len();
    let tol = F::stochastic_tol();
    for (s, per_action) in base.transition.iter().enumerate() {
        if per_action.len() != a_count || base.mean_reward[s].len() != a_count {
            return Err(Error::InvalidMdp(format!("state {s} has the wrong number of actions")));
        }
        for (a, row) in per_action.iter().enumerate() {
            if row.len() != s_count {
                return Err(Error::NonStochasticRow {
                    state: s,
                    action: a,
                    reason: format!("expected {s_count} entries, got {}", row.len()),
                });
            }
            check_distribution(row, tol).map_err(|reason| Error::NonStochasticRow {
                state: s,
                action: a,
                reason,
            })?;
        }
    }
    let layout = Layout::new(vec![s_count; horizon], a_count)?;
    let mut transition = Vec::with_capacity(layout.num_states() * a_count);
    let mut rewards = Vec::with_capacity(layout.num_states());
    for l in 0..horizon {
        for s in 0..s_count {
            rewards.push(base.mean_reward[s].clone());
            for a in 0..a_count {
                transition.push(if l + 1 < horizon {
                    base.transition[s][a].clone()
                } else {
                    Vec::new()
                });
            }
        }
    }
    LayeredMdp::new(
        layout,
        transition,
        Table::from_rows(&rewards)?,
        base.reward_noise_std,
        base.rho.clone(),
    )
}

/// Optimal Q*/V* by backward induction; ties in `max` are irrelevant to values.
pub fn solve_optimal<F: Scalar>(mdp: &LayeredMdp<F>) -> ValueTables<F> {
    backward(mdp, mdp.mean_reward(), |q_row, _| {
        q_row.iter().copied().fold(F::neg_infinity(), F::max)
    })
}

/// `Q^π` and `V^π` by the policy Bellman recursion.
pub fn evaluate_policy<F: Scalar>(mdp: &LayeredMdp<F>, policy: &Policy<F>) -> Result<ValueTables<F>> {
    check_policy_shape(mdp.layout(), policy)?;
    Ok(backward(mdp, mdp.mean_reward(), |q_row, x| {
        q_row.iter().zip(policy.row(x)).map(|(&q, &p)| p * q).sum()
    }))
}

/// `J^π = Σ_{s_1} ρ[s_1] V^π[s_1]`.
pub fn performance<F: Scalar>(mdp: &LayeredMdp<F>, policy: &Policy<F>) -> Result<F> {
    let values = evaluate_policy(mdp, policy)?;
    Ok(expect_initial(mdp.layout(), mdp.rho(), &values.v))
}

/// `Σ_{s_1} ρ[s_1] v[s_1]` over the first layer.
pub fn expect_initial<F: Scalar>(layout: &Layout, rho: &[F], v: &[F]) -> F {
    layout.layer(0).zip(rho).map(|(x, &p)| p * v[x]).sum()
}

/// Shared backward recursion: `Q[x,a] = r[x,a] + Σ P V_{l+1}`, `V[x] = value(Q[x,·], x)`.
pub(crate) fn backward<F, D, V>(dynamics: &D, reward: &Table<F>, mut value: V) -> ValueTables<F>
where
    F: Scalar,
    D: Dynamics<F> + ?Sized,
    V: FnMut(&[F], usize) -> F,
{
    let layout = dynamics.layout().clone();
    let a_count = layout.actions();
    let mut q = Table::zeros(layout.num_states(), a_count);
    let mut v = vec![F::zero(); layout.num_states()];
    for l in (0..layout.horizon()).rev() {
        let next = if l + 1 < layout.horizon() {
            let r = layout.layer(l + 1);
            v[r].to_vec()
        } else {
            Vec::new()
        };
        for x in layout.layer(l) {
            for a in 0..a_count {
                let cont = if next.is_empty() {
                    F::zero()
                } else {
                    dynamics.expect_next(x, a, &next)
                };
                q.set(x, a, reward.get(x, a) + cont);
            }
            v[x] = value(q.row(x), x);
        }
    }
    ValueTables { q, v }
}

/// Greedy policy on `q`, ties broken toward the lowest action index.
pub fn greedy_policy<F: Scalar>(q: &Table<F>) -> Policy<F> {
    let actions: Vec<usize> = (0..q.rows()).map(|x| sampling::argmax_first(q.row(x))).collect();
    Policy::deterministic(&actions, q.cols())
}

/// Greedy policy on `q` spreading mass uniformly over tied maximizers.
pub fn greedy_policy_uniform_ties<F: Scalar>(q: &Table<F>) -> Policy<F> {
    let mut probs = Table::zeros(q.rows(), q.cols());
    for x in 0..q.rows() {
        let row = q.row(x);
        let best = row.iter().copied().fold(F::neg_infinity(), F::max);
        let ties = row.iter().filter(|&&v| v == best).count();
        for (a, &v) in row.iter().enumerate() {
            if v == best {
                probs.set(x, a, F::one() / F::of_usize(ties));
            }
        }
    }
    Policy::from_table_unchecked(probs)
}

/// Forward recursion for the state-action occupancy measure:
/// `λ[s_1,a] = ρ[s_1] π[s_1,a]`, `λ[s',a'] = π[s',a'] Σ_{s,a} P[s'|s,a] λ[s,a]`.
pub fn occupancy<F, D>(dynamics: &D, rho: &[F], policy: &Policy<F>) -> Result<OccupancyMeasure<F>>
where
    F: Scalar,
    D: Dynamics<F> + ?Sized,
{
    let layout = dynamics.layout().clone();
    check_policy_shape(&layout, policy)?;
    if rho.len() != layout.layer_sizes()[0] {
        return Err(Error::InvalidMdp("rho must cover the first layer".into()));
    }
    let a_count = layout.actions();
    let mut lambda = Table::zeros(layout.num_states(), a_count);
    let mut mass: Vec<F> = rho.to_vec();
    for l in 0..layout.horizon() {
        let mut inflow = if l + 1 < layout.horizon() {
            vec![F::zero(); layout.layer_sizes()[l + 1]]
        } else {
            Vec::new()
        };
        for (i, x) in layout.layer(l).enumerate() {
            for a in 0..a_count {
                let w = mass[i] * policy.prob(x, a);
                lambda.set(x, a, w);
                if !inflow.is_empty() {
                    dynamics.spread_next(x, a, w, &mut inflow);
                }
            }
        }
        mass = inflow;
    }
    Ok(OccupancyMeasure { layout, lambda })
}

fn check_policy_shape<F: Scalar>(layout: &Layout, policy: &Policy<F>) -> Result<()> {
    if policy.states() != layout.num_states() || policy.actions() != layout.actions() {
        return Err(Error::PolicyMismatch(format!(
            "policy is {}x{}, MDP has {} states and {} actions",
            policy.states(),
            policy.actions(),
            layout.num_states(),
            layout.actions()
        )));
    }
    Ok(())
}
