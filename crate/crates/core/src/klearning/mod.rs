//! K-learning: optimistic K-values from the inflated-CGF Bellman operator,
//! temperature schedules and the optimal-temperature program, Boltzmann
//! policies, and the per-episode regret certificate.

mod certificate;
mod golden;
mod search;
mod solve;
mod temperature;

pub use certificate::{
    certificate_for, delta_bonus, dual_diagnostic, phi, regret_certificate, Certificate, DualDiagnostic,
};
pub use golden::{golden_section, GoldenResult};
pub use search::{
    klearning_episode, optimize_tau, scheduled_tau, Boundary, Episode, TauMode, TauOptimum, TauSearch,
};
pub use solve::{
    bellman_residual, boltzmann_policy, k_backup, objective, solve_at, variational_gap, variational_value,
    KSolution,
};
pub use temperature::{bandit_schedule_tau, schedule_tau, Temperature};
