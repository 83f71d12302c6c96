//! Max-shifted log-sum-exp, Boltzmann distributions and entropy.

use crate::Scalar;

/// `max_i x_i`, or `-inf` for an empty slice.
#[inline]
pub fn max_of<F: Scalar>(xs: &[F]) -> F {
    xs.iter().copied().fold(F::neg_infinity(), F::max)
}

/// `log Σ exp(x_i)`, computed after subtracting the maximum.
pub fn log_sum_exp<F: Scalar>(xs: &[F]) -> F {
    let m = max_of(xs);
    if !m.is_finite() {
        return m;
    }
    let s: F = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// `τ log Σ exp(x_i / τ)`: the soft maximum of `xs` at temperature `τ`.
///
/// Written as `max + τ log Σ exp((x_i - max)/τ)` so it neither overflows for
/// small `τ` nor loses the maximum to rounding.
pub fn soft_max_value<F: Scalar>(xs: &[F], tau: F) -> F {
    let m = max_of(xs);
    if !m.is_finite() {
        return m;
    }
    let s: F = xs.iter().map(|&x| ((x - m) / tau).exp()).sum();
    m + tau * s.ln()
}

/// Writes `exp(x_i/τ) / Σ_j exp(x_j/τ)` into `out`.
pub fn boltzmann_into<F: Scalar>(xs: &[F], tau: F, out: &mut [F]) {
    debug_assert_eq!(xs.len(), out.len());
    let m = max_of(xs);
    let mut z = F::zero();
    for (o, &x) in out.iter_mut().zip(xs) {
        *o = ((x - m) / tau).exp();
        z += *o;
    }
    for o in out.iter_mut() {
        *o /= z;
    }
}

pub fn boltzmann<F: Scalar>(xs: &[F], tau: F) -> Vec<F> {
    let mut out = vec![F::zero(); xs.len()];
    boltzmann_into(xs, tau, &mut out);
    out
}

/// Shannon entropy in nats with `0 log 0 = 0`.
pub fn entropy<F: Scalar>(p: &[F]) -> F {
    p.iter()
        .filter(|&&q| q > F::zero())
        .map(|&q| -q * q.ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lse_is_shift_stable() {
        let xs = [1000.0_f64, 1000.0];
        assert_relative_eq!(log_sum_exp(&xs), 1000.0 + 2f64.ln(), epsilon = 1e-12);
        let tiny = soft_max_value(&[1.0_f64, 0.0], 1e-6);
        assert_relative_eq!(tiny, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn boltzmann_matches_direct_softmax() {
        let p = boltzmann(&[1.0_f64, 0.0], 1.0);
        let e = 1f64.exp();
        assert_relative_eq!(p[0], e / (1.0 + e), epsilon = 1e-15);
        assert_relative_eq!(p[0], 0.7310585786300049, epsilon = 1e-12);
        assert_relative_eq!(p[1], 0.2689414213699951, epsilon = 1e-12);
    }

    #[test]
    fn entropy_of_point_mass_is_zero() {
        assert_eq!(entropy(&[1.0_f64, 0.0, 0.0]), 0.0);
        assert_relative_eq!(entropy(&[0.5_f64, 0.5]), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let v = soft_max_value(&[1.0_f32, 0.0], 1.0);
        assert!((v - (1.0 + (1.0 + (-1.0f32).exp()).ln())).abs() < 1e-6);
    }
}
