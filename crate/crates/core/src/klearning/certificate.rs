//! Online regret-bound certificate and the occupancy-measure dual.
//!
//! For a fixed policy the per-state quantity
//! `Δ[s] = τ H(π_s) + Σ_a π[s,a] (δ[s,a] + Σ_{s'} E[P(s'|s,a)] Δ[s'])`
//! bounds the expected regret of the episode started at `s`, and its
//! expectation over `ρ` unrolls to `Φ(τ, λ)`, a sum of local terms weighted
//! by the occupancy measure.

use crate::belief::BeliefState;
use crate::error::{Error, Result};
use crate::mdp::{expect_initial, occupancy, Dynamics, OccupancyMeasure, Policy, Table};
use crate::softmax::entropy;
use crate::Scalar;

use super::golden::golden_section;
use super::search::TauSearch;
use super::solve::KSolution;
use super::temperature::Temperature;

#[derive(Debug, Clone)]
pub struct Certificate<F: Scalar> {
    /// `δ[s,a] = τ G̃(1/τ) - E μ[s,a]`.
    pub delta: Table<F>,
    /// `Δ[s]` from the backward recursion.
    pub delta_state: Vec<F>,
    /// `Φ(τ, λ)` evaluated on the policy's occupancy measure.
    pub phi: F,
    /// `|E_{s_1} Δ[s_1] - Φ|`, zero up to rounding.
    pub unroll_residual: F,
    pub occupancy: OccupancyMeasure<F>,
}

/// `δ(τ) = τ G̃(1/τ) - E μ`; nonnegative for Gaussian posteriors.
#[inline]
pub fn delta_bonus<F: Scalar>(belief: &BeliefState<F>, x: usize, a: usize, tau: Temperature<F>) -> F {
    let tau = tau.get();
    F::of(0.5) * (belief.posterior_var(x, a) + belief.transition_bonus_weight(x, a)) / tau
}

/// `Φ(τ, λ) = Σ_{s,a} λ[s,a] (τ H(π(λ_s)) + δ[s,a](τ))`.
pub fn phi<F: Scalar>(belief: &BeliefState<F>, tau: Temperature<F>, lambda: &OccupancyMeasure<F>) -> F {
    let mut total = F::zero();
    for x in 0..belief.num_states() {
        let Some(pi) = lambda.induced_policy_row(x) else {
            continue;
        };
        let h = entropy(&pi);
        for a in 0..belief.actions() {
            let w = lambda.get(x, a);
            if w > F::zero() {
                total += w * (tau.get() * h + delta_bonus(belief, x, a, tau));
            }
        }
    }
    total
}

/// Certificate of `(τ, π)` under the belief's expected dynamics.
pub fn certificate_for<F: Scalar>(
    belief: &BeliefState<F>,
    tau: Temperature<F>,
    policy: &Policy<F>,
) -> Result<Certificate<F>> {
    let layout = belief.layout();
    let a_count = layout.actions();
    let mut delta = Table::zeros(layout.num_states(), a_count);
    for x in 0..layout.num_states() {
        for a in 0..a_count {
            delta.set(x, a, delta_bonus(belief, x, a, tau));
        }
    }
    let mut delta_state = vec![F::zero(); layout.num_states()];
    for l in (0..layout.horizon()).rev() {
        let next: Vec<F> = if l + 1 < layout.horizon() {
            delta_state[layout.layer(l + 1)].to_vec()
        } else {
            Vec::new()
        };
        for x in layout.layer(l) {
            let row = policy.row(x);
            let mut value = tau.get() * entropy(row);
            for (a, &p) in row.iter().enumerate() {
                if p > F::zero() {
                    let cont = if next.is_empty() {
                        F::zero()
                    } else {
                        belief.expect_next(x, a, &next)
                    };
                    value += p * (delta.get(x, a) + cont);
                }
            }
            delta_state[x] = value;
        }
    }
    let occ = occupancy(belief, belief.rho(), policy)?;
    let phi = phi(belief, tau, &occ);
    let unrolled = expect_initial(layout, belief.rho(), &delta_state);
    if !phi.is_finite() || !unrolled.is_finite() {
        return Err(Error::NonFinite("regret certificate".into()));
    }
    Ok(Certificate {
        delta,
        delta_state,
        phi,
        unroll_residual: (unrolled - phi).abs(),
        occupancy: occ,
    })
}

/// Recomputes the certificate of a solution from its temperature and policy.
pub fn regret_certificate<F: Scalar>(belief: &BeliefState<F>, sol: &KSolution<F>) -> Result<Certificate<F>> {
    certificate_for(belief, sol.tau, &sol.policy)
}

/// Dual side of the temperature program at a primal solution.
#[derive(Debug, Clone)]
pub struct DualDiagnostic<F: Scalar> {
    pub occupancy: OccupancyMeasure<F>,
    /// `Σ λ E μ + min_τ Φ(τ, λ)`.
    pub dual_value: F,
    /// Primal objective minus dual value; nonnegative up to search tolerance.
    pub gap: F,
    /// Minimizer of `Φ(·, λ)`.
    pub inner_tau: F,
}

/// Evaluates the dual objective at `λ*`, the occupancy measure of the
/// solution's policy, minimizing `Φ(τ, λ*)` over `τ` by golden-section
/// search on `log τ`.
pub fn dual_diagnostic<F: Scalar>(
    belief: &BeliefState<F>,
    sol: &KSolution<F>,
    search: &TauSearch<F>,
) -> Result<DualDiagnostic<F>> {
    let occ = sol.certificate.occupancy.clone();
    let mut linear = F::zero();
    for x in 0..belief.num_states() {
        for a in 0..belief.actions() {
            linear += occ.get(x, a) * belief.posterior_mean(x, a);
        }
    }
    let eval = |u: F| phi(belief, from_log(u), &occ);
    let found = golden_section(
        eval,
        search.lower.ln(),
        search.upper.ln(),
        search.tol,
        search.max_iter,
    );
    let dual_value = linear + found.fx;
    Ok(DualDiagnostic {
        occupancy: occ,
        dual_value,
        gap: sol.objective - dual_value,
        inner_tau: found.x.exp(),
    })
}

pub(crate) fn from_log<F: Scalar>(u: F) -> Temperature<F> {
    Temperature::new(u.exp()).expect("exp of a finite log-temperature is positive")
}
