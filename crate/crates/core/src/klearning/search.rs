use serde::{Deserialize, Serialize};

use crate::belief::BeliefState;
use crate::error::Result;
use crate::Scalar;

use super::certificate::from_log;
use super::golden::golden_section;
use super::solve::{objective, solve_at, KSolution};
use super::temperature::{bandit_schedule_tau, schedule_tau, Temperature};

/// Bracket and stopping rule for the search over `log τ`.
#[derive(Debug, Clone, Copy)]
pub struct TauSearch<F> {
    pub lower: F,
    pub upper: F,
    /// Width of the final bracket in `log τ`, i.e. a relative tolerance on `τ`.
    pub tol: F,
    pub max_iter: usize,
    /// Factor applied once to the touched edge before a boundary optimum is flagged.
    pub widen: F,
}

impl<F: Scalar> Default for TauSearch<F> {
    fn default() -> Self {
        Self {
            lower: F::of(1e-6),
            upper: F::of(1e6),
            tol: F::of(1e-8),
            max_iter: 200,
            widen: F::of(1e3),
        }
    }
}

/// Which edge of the (widened) bracket the optimum sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Lower,
    Upper,
}

#[derive(Debug, Clone)]
pub struct TauOptimum<F: Scalar> {
    pub solution: KSolution<F>,
    /// Set when the minimum lies on the bracket edge even after widening.
    pub boundary: Option<Boundary>,
    pub evaluations: usize,
}

/// Minimizes the temperature objective over `τ`.
///
/// For fixed `τ` the smallest feasible K is the Bellman-equality solution,
/// so the joint program reduces to a convex function of `τ`, searched here
/// by golden section on `log τ`.
pub fn optimize_tau<F: Scalar>(belief: &BeliefState<F>, search: &TauSearch<F>) -> Result<TauOptimum<F>> {
    let mut failure = None;
    let mut eval = |u: F| match objective(belief, from_log(u)) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            F::infinity()
        }
    };
    let (mut lo, mut hi) = (search.lower.ln(), search.upper.ln());
    let mut found = golden_section(&mut eval, lo, hi, search.tol, search.max_iter);
    let mut evaluations = found.evaluations;
    let widen = search.widen.ln();
    if found.at_lower_edge || found.at_upper_edge {
        if found.at_lower_edge {
            lo -= widen;
        } else {
            hi += widen;
        }
        found = golden_section(&mut eval, lo, hi, search.tol, search.max_iter);
        evaluations += found.evaluations;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let boundary = if found.at_lower_edge {
        Some(Boundary::Lower)
    } else if found.at_upper_edge {
        Some(Boundary::Upper)
    } else {
        None
    };
    let solution = solve_at(belief, from_log(found.x))?;
    Ok(TauOptimum {
        solution,
        boundary,
        evaluations,
    })
}

/// How the temperature of an episode is chosen; fixed for a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauMode {
    Scheduled,
    Optimal,
}

/// Scheduled temperature for the belief's current episode: the bandit
/// schedule when the problem is a single-state, single-step bandit and the
/// MDP schedule otherwise.
pub fn scheduled_tau<F: Scalar>(belief: &BeliefState<F>) -> Result<Temperature<F>> {
    let t = belief.episode();
    if belief.horizon() == 1 && belief.num_states() == 1 {
        bandit_schedule_tau(t, belief.sigma(), belief.actions())
    } else {
        schedule_tau(
            t,
            belief.sigma(),
            belief.horizon(),
            belief.actions(),
            belief.num_states(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct Episode<F: Scalar> {
    /// The policy to execute is `solution.policy`.
    pub solution: KSolution<F>,
    pub boundary: Option<Boundary>,
}

/// One episode of K-learning: pick `τ`, back up K, return the Boltzmann policy.
pub fn klearning_episode<F: Scalar>(
    belief: &BeliefState<F>,
    mode: TauMode,
    search: &TauSearch<F>,
) -> Result<Episode<F>> {
    match mode {
        TauMode::Scheduled => Ok(Episode {
            solution: solve_at(belief, scheduled_tau(belief)?)?,
            boundary: None,
        }),
        TauMode::Optimal => {
            let opt = optimize_tau(belief, search)?;
            Ok(Episode {
                solution: opt.solution,
                boundary: opt.boundary,
            })
        }
    }
}
