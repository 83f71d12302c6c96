#![allow(dead_code)]

use klearning::belief::{BeliefPrior, BeliefState};
use klearning::mdp::{LayeredMdp, Layout, Table};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_layout(rng: &mut ChaCha8Rng, max_states: usize, max_horizon: usize, actions: usize) -> Layout {
    let horizon = rng.random_range(1..=max_horizon);
    let sizes = (0..horizon).map(|_| rng.random_range(1..=max_states)).collect();
    Layout::new(sizes, actions).unwrap()
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

pub fn random_mdp_on(rng: &mut ChaCha8Rng, layout: Layout) -> LayeredMdp<f64> {
    let a_count = layout.actions();
    let mut transition = Vec::new();
    let mut rewards = Vec::new();
    for x in 0..layout.num_states() {
        let mut row = Vec::new();
        for _ in 0..a_count {
            let succ = layout.successors(x);
            transition.push(if succ == 0 { Vec::new() } else { random_distribution(rng, succ) });
            row.push(rng.random::<f64>());
        }
        rewards.push(row);
    }
    let rho = random_distribution(rng, layout.layer_sizes()[0]);
    LayeredMdp::new(layout, transition, Table::from_rows(&rewards).unwrap(), 1.0, rho).unwrap()
}

pub fn random_mdp(rng: &mut ChaCha8Rng, max_states: usize, max_horizon: usize, actions: usize) -> LayeredMdp<f64> {
    let layout = random_layout(rng, max_states, max_horizon, actions);
    random_mdp_on(rng, layout)
}

/// A belief with random prior means and variances that has absorbed a few
/// random episodes of a random MDP.
pub fn random_belief(rng: &mut ChaCha8Rng, max_states: usize, max_horizon: usize, actions: usize) -> BeliefState<f64> {
    let mdp = random_mdp(rng, max_states, max_horizon, actions);
    let episodes = rng.random_range(0..6);
    belief_after_play(rng, &mdp, episodes)
}

pub fn belief_after_play(rng: &mut ChaCha8Rng, mdp: &LayeredMdp<f64>, episodes: usize) -> BeliefState<f64> {
    let layout = mdp.layout().clone();
    let n = layout.num_states();
    let a = layout.actions();
    let noise_var = 1.0;
    let mean = Table::from_rows(&(0..n).map(|_| (0..a).map(|_| rng.random_range(-0.5..0.5)).collect()).collect::<Vec<_>>()).unwrap();
    let var = Table::from_rows(&(0..n).map(|_| (0..a).map(|_| rng.random_range(0.1..1.0)).collect()).collect::<Vec<_>>()).unwrap();
    let prior = BeliefPrior {
        reward_mean: mean,
        reward_var: var,
        noise_var,
        dirichlet_alpha: 1.0,
    };
    let mut belief = BeliefState::new(layout.clone(), mdp.rho().to_vec(), &prior).unwrap();
    let uniform = klearning::mdp::Policy::uniform(n, a);
    for _ in 0..episodes {
        let steps = mdp.rollout(&uniform, rng);
        belief.observe_episode(&steps).unwrap();
    }
    belief
}

/// `J^π` from a forward pass over state distributions, independent of the
/// backward recursions under test.
pub fn forward_value(mdp: &LayeredMdp<f64>, start: &[f64], first_layer: usize, policy: &dyn Fn(usize) -> Vec<f64>) -> f64 {
    let layout = mdp.layout();
    let mut dist = start.to_vec();
    let mut total = 0.0;
    for l in first_layer..layout.horizon() {
        let mut next = if l + 1 < layout.horizon() {
            vec![0.0; layout.layer_sizes()[l + 1]]
        } else {
            Vec::new()
        };
        for (i, x) in layout.layer(l).enumerate() {
            if dist[i] == 0.0 {
                continue;
            }
            for (a, p) in policy(x).into_iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                total += dist[i] * p * mdp.mean_reward().get(x, a);
                for (j, q) in mdp.transition_row(x, a).iter().enumerate() {
                    next[j] += dist[i] * p * q;
                }
            }
        }
        dist = next;
    }
    total
}

/// Optimal value of every state by enumerating all deterministic policies.
pub fn brute_force_optimal(mdp: &LayeredMdp<f64>) -> Vec<f64> {
    let layout = mdp.layout();
    let n = layout.num_states();
    let a = layout.actions();
    let total = a.pow(n as u32);
    let mut best = vec![f64::NEG_INFINITY; n];
    for code in 0..total {
        let mut c = code;
        let choice: Vec<usize> = (0..n)
            .map(|_| {
                let v = c % a;
                c /= a;
                v
            })
            .collect();
        let policy = |x: usize| {
            let mut row = vec![0.0; a];
            row[choice[x]] = 1.0;
            row
        };
        for x in 0..n {
            let l = layout.layer_of(x);
            let mut start = vec![0.0; layout.layer_sizes()[l]];
            start[layout.local(x)] = 1.0;
            let v = forward_value(mdp, &start, l, &policy);
            if v > best[x] {
                best[x] = v;
            }
        }
    }
    best
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
