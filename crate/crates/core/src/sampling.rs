//! Random draws used by posterior sampling and simulation.
//!
//! Draws are made in `f64` and converted, so every scalar type sees the same
//! random stream for a given seed.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::Scalar;

pub fn normal<F: Scalar, R: Rng + ?Sized>(rng: &mut R, mean: F, std: F) -> F {
    let z: f64 = StandardNormal.sample(rng);
    mean + std * F::of(z)
}

/// One draw from `Dirichlet(alpha)` via normalized Gamma variates.
pub fn dirichlet<F: Scalar, R: Rng + ?Sized>(rng: &mut R, alpha: &[F]) -> Vec<F> {
    let mut draws: Vec<f64> = alpha
        .iter()
        .map(|a| {
            Gamma::new(a.as_f64(), 1.0)
                .expect("Dirichlet parameters are positive")
                .sample(rng)
        })
        .collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 && total.is_finite() {
        draws.iter_mut().for_each(|g| *g /= total);
    } else {
        // every gamma draw underflowed (tiny alphas): fall back to the largest alpha
        let best = argmax_first(alpha);
        draws.iter_mut().enumerate().for_each(|(i, g)| *g = if i == best { 1.0 } else { 0.0 });
    }
    draws.into_iter().map(F::of).collect()
}

/// Index drawn from a probability vector by inverse CDF.
pub fn categorical<F: Scalar, R: Rng + ?Sized>(rng: &mut R, probs: &[F]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, p) in probs.iter().enumerate() {
        let p = p.as_f64();
        if p > 0.0 {
            last_positive = i;
        }
        acc += p;
        if u < acc {
            return i;
        }
    }
    last_positive
}

/// Uniformly random index among the maximizers of `xs`.
pub fn argmax_random<F: Scalar, R: Rng + ?Sized>(rng: &mut R, xs: &[F]) -> usize {
    let best = xs.iter().copied().fold(F::neg_infinity(), F::max);
    let ties: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] == best).collect();
    match ties.len() {
        0 => 0,
        1 => ties[0],
        n => ties[rng.random_range(0..n)],
    }
}

/// Lowest index among the maximizers of `xs`.
pub fn argmax_first<F: Scalar>(xs: &[F]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dirichlet_rows_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = dirichlet(&mut rng, &[0.5_f64, 1.0, 2.0]);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn categorical_respects_zero_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            assert_eq!(categorical(&mut rng, &[0.0_f64, 1.0, 0.0]), 1);
        }
    }

    #[test]
    fn argmax_first_breaks_ties_low() {
        assert_eq!(argmax_first(&[1.0_f64, 3.0, 3.0]), 1);
    }
}
