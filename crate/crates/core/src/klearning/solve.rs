use crate::belief::BeliefState;
use crate::error::{Error, Result};
use crate::mdp::{expect_initial, Dynamics, Policy, Table};
use crate::softmax::{boltzmann_into, entropy, soft_max_value};
use crate::Scalar;

use super::certificate::{certificate_for, Certificate};
use super::temperature::Temperature;

/// K-values, temperature, Boltzmann policy and regret certificate for one episode.
#[derive(Debug, Clone)]
pub struct KSolution<F: Scalar> {
    pub k: Table<F>,
    pub tau: Temperature<F>,
    pub policy: Policy<F>,
    /// `E_{s_1} τ log Σ_a exp(K[s_1, a] / τ)`.
    pub objective: F,
    pub certificate: Certificate<F>,
}

/// Backward recursion `K_l = B_l(τ, K_{l+1})` with `K_{L+1} = 0`:
///
/// `K[s,a] = τ G̃(1/τ) + Σ_{s'} E[P(s'|s,a)] τ log Σ_{a'} exp(K[s',a'] / τ)`.
pub fn k_backup<F: Scalar>(belief: &BeliefState<F>, tau: Temperature<F>) -> Result<Table<F>> {
    let tau = tau.get();
    let layout = belief.layout();
    let a_count = layout.actions();
    let mut k = Table::zeros(layout.num_states(), a_count);
    let mut next: Vec<F> = Vec::new();
    for l in (0..layout.horizon()).rev() {
        for x in layout.layer(l) {
            for a in 0..a_count {
                let mut value = belief.scaled_inflated_cgf(x, a, tau);
                if !next.is_empty() {
                    value += belief.expect_next(x, a, &next);
                }
                k.set(x, a, value);
            }
        }
        next.clear();
        next.extend(layout.layer(l).map(|x| soft_max_value(k.row(x), tau)));
    }
    if !k.all_finite() {
        return Err(Error::NonFinite(format!("K-values at τ = {tau}")));
    }
    Ok(k)
}

/// `π[s,a] ∝ exp(K[s,a] / τ)`.
pub fn boltzmann_policy<F: Scalar>(k: &Table<F>, tau: Temperature<F>) -> Policy<F> {
    let mut probs = Table::zeros(k.rows(), k.cols());
    for x in 0..k.rows() {
        boltzmann_into(k.row(x), tau.get(), probs.row_mut(x));
    }
    Policy::from_table_unchecked(probs)
}

/// `τ log Σ exp(K/τ)`, the maximum of `π·K + τ H(π)` over the simplex.
pub fn variational_value<F: Scalar>(k_row: &[F], tau: Temperature<F>) -> F {
    soft_max_value(k_row, tau.get())
}

/// `variational_value - (π·K + τ H(π))`; zero exactly at the Boltzmann policy.
pub fn variational_gap<F: Scalar>(k_row: &[F], tau: Temperature<F>, policy_row: &[F]) -> F {
    let linear: F = k_row.iter().zip(policy_row).map(|(&k, &p)| k * p).sum();
    variational_value(k_row, tau) - (linear + tau.get() * entropy(policy_row))
}

/// Objective of the temperature program at `τ`: runs the backup and returns
/// `Σ_{s_1} ρ[s_1] τ log Σ_a exp(K[s_1, a] / τ)`.
pub fn objective<F: Scalar>(belief: &BeliefState<F>, tau: Temperature<F>) -> Result<F> {
    let k = k_backup(belief, tau)?;
    Ok(initial_soft_value(belief, &k, tau))
}

fn initial_soft_value<F: Scalar>(belief: &BeliefState<F>, k: &Table<F>, tau: Temperature<F>) -> F {
    let layout = belief.layout();
    let soft: Vec<F> = layout.layer(0).map(|x| soft_max_value(k.row(x), tau.get())).collect();
    let mut padded = vec![F::zero(); layout.num_states()];
    padded[..soft.len()].copy_from_slice(&soft);
    expect_initial(layout, belief.rho(), &padded)
}

/// Full solution at a fixed temperature, certificate included.
pub fn solve_at<F: Scalar>(belief: &BeliefState<F>, tau: Temperature<F>) -> Result<KSolution<F>> {
    let k = k_backup(belief, tau)?;
    let policy = boltzmann_policy(&k, tau);
    let objective = initial_soft_value(belief, &k, tau);
    let certificate = certificate_for(belief, tau, &policy)?;
    Ok(KSolution {
        k,
        tau,
        policy,
        objective,
        certificate,
    })
}

/// Largest `|K_l - B_l(τ, K_{l+1})|` entry of a solution.
pub fn bellman_residual<F: Scalar>(belief: &BeliefState<F>, sol: &KSolution<F>) -> F {
    let tau = sol.tau.get();
    let layout = belief.layout();
    let mut worst = F::zero();
    for l in 0..layout.horizon() {
        let next: Vec<F> = if l + 1 < layout.horizon() {
            layout.layer(l + 1).map(|x| soft_max_value(sol.k.row(x), tau)).collect()
        } else {
            Vec::new()
        };
        for x in layout.layer(l) {
            for a in 0..layout.actions() {
                let mut rhs = belief.scaled_inflated_cgf(x, a, tau);
                if !next.is_empty() {
                    rhs += belief.expect_next(x, a, &next);
                }
                worst = worst.max((sol.k.get(x, a) - rhs).abs());
            }
        }
    }
    worst
}
