mod common;

use klearning::belief::{BeliefPrior, BeliefState};
use klearning::mdp::{LayeredMdp, Layout, Table};
use klearning::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{mean_se, random_belief, random_mdp};

fn fresh(layer_sizes: Vec<usize>, actions: usize) -> BeliefState<f64> {
    let layout = Layout::new(layer_sizes, actions).unwrap();
    let first = layout.layer_sizes()[0];
    let prior = BeliefPrior::uniform(&layout, 0.0, None, 1.0, 1.0);
    BeliefState::new(layout, vec![1.0 / first as f64; first], &prior).unwrap()
}

/// Posterior mean and variance of `μ` under a `N(m0, v0)` prior and unit
/// Gaussian likelihood, by trapezoidal quadrature on a fine grid.
fn grid_posterior(m0: f64, v0: f64, obs: &[f64]) -> (f64, f64) {
    let (lo, hi, n) = (-12.0, 12.0, 400_001);
    let h = (hi - lo) / (n - 1) as f64;
    let log_density = |mu: f64| {
        -(mu - m0).powi(2) / (2.0 * v0) - obs.iter().map(|r| (r - mu).powi(2) / 2.0).sum::<f64>()
    };
    let peak = (0..n).map(|i| log_density(lo + i as f64 * h)).fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let mu = lo + i as f64 * h;
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 } * (log_density(mu) - peak).exp();
        z += w;
        s1 += w * mu;
        s2 += w * mu * mu;
    }
    let mean = s1 / z;
    (mean, s2 / z - mean * mean)
}

#[test]
fn conjugate_update_matches_grid_posterior() {
    let mut b = fresh(vec![1], 2);
    b.update_reward(0, 0, 1.0).unwrap();
    assert!((b.posterior_mean(0, 0) - 0.5).abs() < 1e-15);
    assert!((b.posterior_var(0, 0) - 0.5).abs() < 1e-15);
    let (gm, gv) = grid_posterior(0.0, 1.0, &[1.0]);
    assert!((gm - 0.5).abs() < 1e-8 && (gv - 0.5).abs() < 1e-8, "grid {gm} {gv}");

    let obs = [0.3, -1.2, 2.5, 0.9];
    let layout = Layout::new(vec![1], 1).unwrap();
    let prior = BeliefPrior::uniform(&layout, 0.7, Some(0.4), 1.0, 1.0);
    let mut b = BeliefState::new(layout, vec![1.0], &prior).unwrap();
    b.update_reward_batch(0, 0, &obs).unwrap();
    let (gm, gv) = grid_posterior(0.7, 0.4, &obs);
    assert!((b.posterior_mean(0, 0) - gm).abs() < 1e-8);
    assert!((b.posterior_var(0, 0) - gv).abs() < 1e-8);
}

#[test]
fn repeated_prior_mean_observations_only_shrink_variance() {
    let mut b = fresh(vec![1], 1);
    assert_eq!(b.posterior_var(0, 0), 1.0);
    for n in 1..=20 {
        b.update_reward(0, 0, 0.0).unwrap();
        assert_eq!(b.posterior_mean(0, 0), 0.0);
        assert!((b.posterior_var(0, 0) - 1.0 / (n as f64 + 1.0)).abs() < 1e-15);
    }
}

#[test]
fn non_finite_rewards_and_bad_priors_are_rejected() {
    let mut b = fresh(vec![1], 1);
    assert!(matches!(b.update_reward(0, 0, f64::NAN), Err(Error::InvalidObservation(_))));
    let layout = Layout::new(vec![1], 1).unwrap();
    let loose = BeliefPrior::uniform(&layout, 0.0, Some(2.0), 1.0, 1.0);
    assert!(matches!(BeliefState::new(layout.clone(), vec![1.0], &loose), Err(Error::InvalidBelief(_))));
    let thin = BeliefPrior::uniform(&Layout::new(vec![1, 3], 1).unwrap(), 0.0, None, 1.0, 0.2);
    assert!(BeliefState::new(Layout::new(vec![1, 3], 1).unwrap(), vec![1.0], &thin).is_err());
}

#[test]
fn dirichlet_counts() {
    let mut b = fresh(vec![1, 2], 1);
    assert_eq!(b.expected_transition(0, 0), vec![0.5, 0.5]);
    b.update_transition(0, 0, 1).unwrap();
    assert_eq!(b.alpha(0, 0), &[2.0, 1.0]);
    assert!((b.expected_transition(0, 0)[0] - 2.0 / 3.0).abs() < 1e-15);
    for k in 2..10 {
        b.update_transition(0, 0, 1).unwrap();
        let p = b.expected_transition(0, 0)[0];
        assert!((p - (1.0 + k as f64) / (2.0 + k as f64)).abs() < 1e-15);
    }
    assert!(matches!(b.update_transition(0, 0, 0), Err(Error::InvalidObservation(_))));
    assert_eq!(b.transition_counts(0, 0), vec![9.0, 0.0]);
}

#[test]
fn dirichlet_posterior_recovers_a_categorical() {
    let truth = [0.5, 0.3, 0.2];
    let mut b = fresh(vec![1, 3], 1);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 10_000;
    for _ in 0..n {
        let j = klearning::sampling::categorical(&mut rng, &truth);
        b.update_transition(0, 0, 1 + j).unwrap();
    }
    for (p, &q) in b.expected_transition(0, 0).iter().zip(&truth) {
        let se = (q * (1.0 - q) / n as f64).sqrt();
        assert!((p - q).abs() < 3.0 * se, "{p} vs {q}");
    }
}

#[test]
fn posterior_samples_match_posterior_moments() {
    let mut b = fresh(vec![1, 2], 2);
    b.update_reward(0, 1, 0.8).unwrap();
    for next in [1, 1, 2] {
        b.update_transition(0, 1, next).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut means = Vec::new();
    let mut first = Vec::new();
    for _ in 0..100_000 {
        let m = b.sample_mdp(&mut rng);
        if means.len() < 10_000 {
            means.push(m.mean_reward().get(0, 1));
        }
        let row = m.transition_row(0, 1);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        first.push(row[0]);
    }
    let (mm, mse) = mean_se(&means);
    assert!((mm - b.posterior_mean(0, 1)).abs() < 3.0 * mse);
    let (pm, pse) = mean_se(&first);
    assert!((pm - b.expected_transition(0, 1)[0]).abs() < 3.0 * pse);
}

#[test]
fn degenerate_posterior_samples_the_mean_mdp() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mdp = random_mdp(&mut rng, 3, 3, 2);
    let b = BeliefState::concentrated(&mdp, 1 << 40).unwrap();
    let sample = b.sample_mdp(&mut rng);
    assert!(sample.mean_reward().max_abs_diff(mdp.mean_reward()) < 1e-12);
    for x in 0..mdp.num_states() {
        for a in 0..2 {
            for (p, q) in sample.transition_row(x, a).iter().zip(mdp.transition_row(x, a)) {
                assert!((p - q).abs() < 1e-4);
            }
        }
    }
}

#[test]
fn inflated_cgf_examples() {
    let b = fresh(vec![1, 1, 1], 1);
    let base = b.reward_cgf(0, 0, 1.0);
    assert!((b.inflated_cgf(0, 0, 1.0).unwrap() - (base + 2.0)).abs() < 1e-15);
    assert_eq!(b.inflated_cgf(2, 0, 0.7).unwrap(), b.reward_cgf(2, 0, 0.7));
    assert!(matches!(b.inflated_cgf(0, 0, -1.0), Err(Error::NegativeBeta(_))));
    let mut seen = b.clone();
    seen.update_reward(0, 0, 0.0).unwrap();
    let bonus = |s: &BeliefState<f64>| s.inflated_cgf(0, 0, 1.0).unwrap() - s.reward_cgf(0, 0, 1.0);
    assert!((bonus(&seen) - bonus(&b) / 2.0).abs() < 1e-15);
    assert_eq!(b.reward_cgf(0, 0, 1.0), 0.5);
}

#[test]
fn default_prior_binds_concentration_bound() {
    let mut b = fresh(vec![1], 3);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..7 {
        b.update_reward(0, 1, rng.random_range(-2.0..2.0)).unwrap();
    }
    for k in -40..=40 {
        let tau = 10f64.powf(k as f64 / 10.0);
        for a in 0..3 {
            let lhs = tau * b.reward_cgf(0, a, 1.0 / tau);
            let rhs = b.posterior_mean(0, a) + b.noise_var() / (2.0 * tau * (b.count(0, a) as f64 + 1.0));
            assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
        }
    }
}

#[test]
fn snapshot_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let b = random_belief(&mut rng, 3, 3, 2);
    let text = b.to_json().unwrap();
    let back = BeliefState::<f64>::from_json(&text).unwrap();
    assert_eq!(back, b);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["A"], 2);
}

#[test]
fn belief_dynamics_match_expected_mdp() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let b = random_belief(&mut rng, 3, 3, 2);
    let m: LayeredMdp<f64> = b.expected_mdp().unwrap();
    assert_eq!(m.mean_reward(), b.posterior_means());
    let occ_b = klearning::mdp::occupancy(&b, b.rho(), &klearning::mdp::Policy::uniform(b.num_states(), 2)).unwrap();
    let occ_m = klearning::mdp::occupancy(&m, m.rho(), &klearning::mdp::Policy::uniform(b.num_states(), 2)).unwrap();
    assert!(occ_b.lambda().max_abs_diff(occ_m.lambda()) < 1e-14);
    let _ = Table::<f64>::zeros(1, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cgf_is_convex_and_vanishes_at_zero(seed in any::<u64>(), b1 in 0.0f64..50.0, b2 in 0.0f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_belief(&mut rng, 3, 3, 2);
        for x in 0..b.num_states() {
            for a in 0..2 {
                prop_assert_eq!(b.reward_cgf(x, a, 0.0), 0.0);
                let mid = b.inflated_cgf(x, a, 0.5 * (b1 + b2)).unwrap();
                let avg = 0.5 * (b.inflated_cgf(x, a, b1).unwrap() + b.inflated_cgf(x, a, b2).unwrap());
                prop_assert!(mid <= avg + 1e-9);
            }
        }
    }

    #[test]
    fn sequential_updates_equal_batch(r1 in -5.0f64..5.0, r2 in -5.0f64..5.0, m0 in -1.0f64..1.0, v0 in 0.01f64..1.0) {
        let layout = Layout::new(vec![1], 1).unwrap();
        let prior = BeliefPrior::uniform(&layout, m0, Some(v0), 1.0, 1.0);
        let mut seq = BeliefState::new(layout.clone(), vec![1.0], &prior).unwrap();
        let mut swapped = seq.clone();
        let mut batch = seq.clone();
        seq.update_reward(0, 0, r1).unwrap();
        seq.update_reward(0, 0, r2).unwrap();
        swapped.update_reward(0, 0, r2).unwrap();
        swapped.update_reward(0, 0, r1).unwrap();
        batch.update_reward_batch(0, 0, &[r1, r2]).unwrap();
        for other in [&swapped, &batch] {
            prop_assert!((seq.posterior_mean(0, 0) - other.posterior_mean(0, 0)).abs() < 1e-12);
            prop_assert!((seq.posterior_var(0, 0) - other.posterior_var(0, 0)).abs() < 1e-12);
        }
    }

    #[test]
    fn posterior_samples_are_valid_mdps(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_belief(&mut rng, 3, 3, 3);
        let sample = b.sample_mdp(&mut rng);
        let back = LayeredMdp::<f64>::from_json(&sample.to_json().unwrap());
        prop_assert!(back.is_ok());
    }
}
