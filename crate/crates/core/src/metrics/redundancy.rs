use super::info::{fragment_average_chi, pointer_entropy, InfoPath};
use crate::error::{Error, Result};
use crate::model::BranchedState;

/// Slack on the threshold comparison so exact plateaus are not lost to rounding.
const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyResult {
    pub delta: f64,
    /// Smallest fragment size whose average χ reaches (1-δ)·H(Π̂_S); `None` when unattainable.
    pub f_delta: Option<usize>,
    /// ♯E / ♯F_δ; `None` when unattainable.
    pub redundancy: Option<f64>,
    /// ⟨χ⟩ for fragment sizes 0..=♯E, bits.
    pub curve: Vec<f64>,
    pub pointer_entropy: f64,
}

impl RedundancyResult {
    pub fn is_attainable(&self) -> bool {
        self.f_delta.is_some()
    }

    pub fn threshold(&self) -> f64 {
        (1.0 - self.delta) * self.pointer_entropy
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange { name: "delta", detail: format!("{delta} not in (0, 1)") });
    }
    Ok(())
}

/// Redundancy from an already computed ⟨χ⟩ curve indexed by fragment size.
pub fn redundancy_from_curve(curve: Vec<f64>, pointer_entropy: f64, delta: f64) -> Result<RedundancyResult> {
    check_delta(delta)?;
    let n_env = curve.len().saturating_sub(1);
    let threshold = (1.0 - delta) * pointer_entropy;
    let f_delta = (1..=n_env).find(|&m| curve[m] >= threshold - THRESHOLD_SLACK);
    Ok(RedundancyResult {
        delta,
        f_delta,
        redundancy: f_delta.map(|f| n_env as f64 / f as f64),
        curve,
        pointer_entropy,
    })
}

pub fn redundancy(state: &BranchedState, delta: f64, path: InfoPath) -> Result<RedundancyResult> {
    check_delta(delta)?;
    let curve = (0..=state.n_spins())
        .map(|m| fragment_average_chi(state, m, path))
        .collect::<Result<Vec<_>>>()?;
    redundancy_from_curve(curve, pointer_entropy(state), delta)
}
