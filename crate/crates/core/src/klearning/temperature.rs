use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// Risk-seeking parameter `τ > 0`, which is also the Boltzmann temperature.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Temperature<F>(F);

impl<F: Scalar> Temperature<F> {
    pub fn new(tau: F) -> Result<Self> {
        if tau > F::zero() && tau.is_finite() {
            Ok(Self(tau))
        } else {
            Err(Error::InvalidTemperature(tau.to_f64().unwrap_or(f64::NAN)))
        }
    }

    #[inline]
    pub fn get(self) -> F {
        self.0
    }
}

/// MDP schedule `τ_t = sqrt((σ² + L²) A |X| (1 + log t) / (4 t L log A))`.
pub fn schedule_tau<F: Scalar>(
    t: u64,
    sigma: F,
    horizon: usize,
    actions: usize,
    states: usize,
) -> Result<Temperature<F>> {
    if t == 0 {
        return Err(Error::ZeroEpisode);
    }
    if actions < 2 {
        return Err(Error::TooFewActions(actions));
    }
    let t_f = F::of(t as f64);
    let l = F::of_usize(horizon);
    let a = F::of_usize(actions);
    let num = (sigma * sigma + l * l) * a * F::of_usize(states) * (F::one() + t_f.ln());
    let den = F::of(4.0) * t_f * l * a.ln();
    Temperature::new((num / den).sqrt())
}

/// Bandit schedule `τ_t = sqrt(σ² A (1 + log t) / (4 t log A))`.
pub fn bandit_schedule_tau<F: Scalar>(t: u64, sigma: F, actions: usize) -> Result<Temperature<F>> {
    if t == 0 {
        return Err(Error::ZeroEpisode);
    }
    if actions < 2 {
        return Err(Error::TooFewActions(actions));
    }
    let t_f = F::of(t as f64);
    let a = F::of_usize(actions);
    let num = sigma * sigma * a * (F::one() + t_f.ln());
    let den = F::of(4.0) * t_f * a.ln();
    Temperature::new((num / den).sqrt())
}
