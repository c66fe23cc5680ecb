use crate::error::{Error, Result};
use crate::model::{BranchedState, Pointer};
use crate::qmath::{
    hermitian_eigensystem, matrix_fractional_power, overlap, DensityOperator, PureState, EIGEN_CLAMP,
};

/// Overlaps below this are treated as perfectly distinguishable.
pub const ZERO_OVERLAP: f64 = 1e-14;
/// Width of the final golden-section bracket on c.
pub const GOLDEN_TOL: f64 = 1e-8;

/// tr(ρ₀^c ρ₁^(1-c)) via explicit fractional powers.
pub fn chernoff_trace(rho0: &DensityOperator, rho1: &DensityOperator, c: f64) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch(format!("dims {} and {}", rho0.dim(), rho1.dim())));
    }
    let a = matrix_fractional_power(rho0, c)?;
    let b = matrix_fractional_power(rho1, 1.0 - c)?;
    Ok(a.matmul(&b)?.trace().re)
}

fn golden_min(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > GOLDEN_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for c in [0.0, 1.0] {
        let v = f(c);
        if v < best.1 {
            best = (c, v);
        }
    }
    best
}

/// Quantum Chernoff information -ln min_c tr(ρ₀^c ρ₁^(1-c)) in nats.
///
/// Returns `f64::INFINITY` when the minimum is below [`ZERO_OVERLAP`].
pub fn chernoff_information(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch(format!("dims {} and {}", rho0.dim(), rho1.dim())));
    }
    let e0 = hermitian_eigensystem(rho0.matrix())?;
    let e1 = hermitian_eigensystem(rho1.matrix())?;
    let n = rho0.dim();
    // |⟨v_i|w_j⟩|² once, then Q(c) = Σ λ_i^c μ_j^(1-c) |⟨v_i|w_j⟩|².
    let mut weights = Vec::new();
    for i in 0..n {
        if e0.values[i] <= EIGEN_CLAMP {
            continue;
        }
        for j in 0..n {
            if e1.values[j] <= EIGEN_CLAMP {
                continue;
            }
            let ov: f64 = (0..n)
                .map(|r| e0.vectors[(r, i)].conj() * e1.vectors[(r, j)])
                .sum::<num_complex::Complex64>()
                .norm_sqr();
            weights.push((e0.values[i], e1.values[j], ov));
        }
    }
    let q = |c: f64| -> f64 {
        weights
            .iter()
            .map(|&(l, m, w)| {
                let lc = if c == 0.0 { 1.0 } else { l.powf(c) };
                let mc = if c == 1.0 { 1.0 } else { m.powf(1.0 - c) };
                lc * mc * w
            })
            .sum()
    };
    let (_, q_min) = golden_min(q);
    if q_min < ZERO_OVERLAP {
        return Ok(f64::INFINITY);
    }
    Ok((-q_min.ln()).max(0.0))
}

/// -ln|⟨a|b⟩|² for pure states.
pub fn chernoff_pure(a: &PureState, b: &PureState) -> Result<f64> {
    let o = overlap(a, b)?.norm_sqr();
    if o < ZERO_OVERLAP {
        return Ok(f64::INFINITY);
    }
    Ok((-o.ln()).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordCount {
    pub value: f64,
    /// Set when the count exceeds ♯E, which no physical redundancy can.
    pub exceeds_environment: bool,
}

/// ξ̄·♯E / ln(1/δ).
pub fn record_count(xi_bar: f64, n_env: usize, delta: f64) -> Result<RecordCount> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::OutOfRange { name: "delta", detail: format!("{delta} not in (0, 1)") });
    }
    if !(xi_bar >= 0.0) {
        return Err(Error::OutOfRange { name: "xi_bar", detail: format!("{xi_bar} is negative") });
    }
    let value = xi_bar * n_env as f64 / (1.0 / delta).ln();
    Ok(RecordCount { value, exceeds_environment: value > n_env as f64 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChernoffResult {
    /// nats
    pub xi_per_spin: Vec<f64>,
    pub xi_bar: f64,
    pub record_count: RecordCount,
}

/// Chernoff information of each spin's conditional pair, with polarization
/// scaling applied; pure pairs use the overlap closed form.
pub fn chernoff_per_spin(state: &BranchedState) -> Result<Vec<f64>> {
    (0..state.n_spins())
        .map(|k| {
            let pair = &state.conditional()[k];
            if state.polarizations()[k] == 1.0 {
                return chernoff_pure(&pair.up, &pair.down);
            }
            let rho = |s| state.conditional_fragment_state(&[k], s);
            chernoff_information(&rho(Pointer::Up)?, &rho(Pointer::Down)?)
        })
        .collect()
}

pub fn chernoff_summary(state: &BranchedState, delta: f64) -> Result<ChernoffResult> {
    let xi_per_spin = chernoff_per_spin(state)?;
    let xi_bar = xi_per_spin.iter().sum::<f64>() / xi_per_spin.len() as f64;
    let record_count = record_count(xi_bar, xi_per_spin.len(), delta)?;
    Ok(ChernoffResult { xi_per_spin, xi_bar, record_count })
}
