use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::bath::BathConfig;
use super::branch::{rotate_z, BranchedState, ConditionalPair};
use super::pulses::{Axis, GateEvent, PulseSequence};
use crate::error::{Error, Result};
use crate::qmath::{overlap, unitary_propagator, ComplexMatrix, DensityOperator, PureState};

/// Minimum sweep length accepted by [`loschmidt_echo_signal`].
pub const MIN_ECHO_POINTS: usize = 8;

/// Electron π/2 pulse followed by a conditional x rotation of every nuclear spin.
pub fn ghz_sequence(n_spins: usize) -> Result<PulseSequence> {
    let mut seq = PulseSequence::new(n_spins);
    seq.push(GateEvent::electron(Axis::Y, PI / 2.0))?;
    for k in 0..n_spins {
        seq.push(GateEvent::conditional(k, Axis::X, PI / 2.0))?;
    }
    Ok(seq)
}

/// Branched state produced by [`ghz_sequence`] on the `n_spins` strongest
/// spins (by |A∥|), nuclei polarized into |0⟩ and the electron starting in |↑⟩.
///
/// Spins appear in the returned state strongest first; polarizations are taken
/// from the bath.
pub fn ghz_protocol(bath: &BathConfig, n_spins: usize) -> Result<BranchedState> {
    if n_spins == 0 || n_spins > bath.len() {
        return Err(Error::OutOfRange {
            name: "n_spins",
            detail: format!("GHZ register of {n_spins} spins from a bath of {}", bath.len()),
        });
    }
    let chosen = bath.strongest(n_spins);
    // Every gate touches the electron and at most one nucleus, so each spin's
    // conditional pair follows from the two-qubit sequence alone.
    let pair_seq = ghz_sequence(1)?;
    let start = PureState::zero().kron(&PureState::zero());
    let out = pair_seq.apply(&start)?;
    let a = out.amplitudes();
    let p_up = a[0].norm_sqr() + a[1].norm_sqr();
    let p_down = a[2].norm_sqr() + a[3].norm_sqr();
    let up = PureState::normalized(vec![a[0], a[1]])?;
    let down = PureState::normalized(vec![a[2], a[3]])?;
    let conditional = vec![ConditionalPair { up, down }; n_spins];
    let polarizations = chosen.iter().map(|&k| bath.spins[k].polarization).collect();
    BranchedState::new(p_up, p_down, conditional, polarizations, Complex64::new(1.0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseySignal {
    /// Re of the electron coherence, in [-1, 1].
    pub coherence: f64,
    /// Probability of returning to |↑⟩ after the second π/2 pulse.
    pub population: f64,
}

/// π/2 – wait t – π/2 on the electron with the bath in its initial state.
pub fn ramsey_signal(bath: &BathConfig, t: f64) -> Result<RamseySignal> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfRange { name: "t", detail: format!("must be non-negative, got {t}") });
    }
    let mut c = Complex64::new((-bath.electron_dephasing_rate * t).exp(), 0.0);
    for spin in &bath.spins {
        let phi = &spin.initial_state;
        c *= overlap(phi, &rotate_z(phi, 2.0 * PI * spin.a_parallel_hz * t))?;
    }
    Ok(RamseySignal { coherence: c.re, population: 0.5 * (1.0 + c.re) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoResult {
    pub taus: Vec<f64>,
    /// Probability of |↑⟩ at the end of each echo.
    pub signal: Vec<f64>,
    /// Bin centres of the one-sided spectrum, Hz.
    pub frequencies_hz: Vec<f64>,
    /// |DFT| of the mean-subtracted signal.
    pub spectrum: Vec<f64>,
    /// Bath indices of the entangled spins.
    pub spins: Vec<usize>,
}

impl EchoResult {
    pub fn bin_width_hz(&self) -> f64 {
        self.frequencies_hz.get(1).copied().unwrap_or(f64::NAN)
    }
}

/// Free-precession generator 2π[ν_L Σ I_z + S_z Σ A∥ I_z] in rad/s on electron + listed spins.
fn free_hamiltonian(bath: &BathConfig, spins: &[usize]) -> ComplexMatrix {
    let n = spins.len();
    let d_env = 1usize << n;
    let diag: Vec<Complex64> = (0..2 * d_env)
        .map(|i| {
            let up = i < d_env;
            let e = i % d_env;
            let mut w = 0.0;
            for (pos, &k) in spins.iter().enumerate() {
                let iz = if (e >> (n - 1 - pos)) & 1 == 0 { 0.5 } else { -0.5 };
                let shift = if up { bath.spins[k].a_parallel_hz } else { 0.0 };
                w += (bath.larmor_hz + shift) * iz;
            }
            Complex64::new(2.0 * PI * w, 0.0)
        })
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Loschmidt echo on the `n_spins` strongest spins: GHZ gates, free evolution
/// with Larmor precession for τ, inverse gates, readout of |↑⟩.
///
/// Nuclei start in diag((1+P)/2, (1-P)/2); the electron coherence decays at
/// the bath dephasing rate during the free evolution. Both nuclear basis states
/// return the same echo amplitude, so the signal does not depend on P.
pub fn loschmidt_echo_signal(bath: &BathConfig, n_spins: usize, tau_sweep: &[f64]) -> Result<EchoResult> {
    if tau_sweep.len() < MIN_ECHO_POINTS {
        return Err(Error::OutOfRange {
            name: "tau_sweep",
            detail: format!("need at least {MIN_ECHO_POINTS} points, got {}", tau_sweep.len()),
        });
    }
    let dt = tau_sweep[1] - tau_sweep[0];
    let uniform = tau_sweep
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1e-15));
    if !(dt > 0.0) || !uniform || tau_sweep[0] < 0.0 {
        return Err(Error::OutOfRange {
            name: "tau_sweep",
            detail: "sweep must be non-negative, ascending and uniformly spaced".into(),
        });
    }
    if n_spins == 0 || n_spins > bath.len() {
        return Err(Error::OutOfRange {
            name: "n_spins",
            detail: format!("echo register of {n_spins} spins from a bath of {}", bath.len()),
        });
    }
    let spins = bath.strongest(n_spins);
    bath.subset(&spins)?.check_dense_size()?;

    let mut rho0 = DensityOperator::from_pure(&PureState::zero(), vec![2])?;
    for &k in &spins {
        let p = bath.spins[k].polarization;
        let nuc = DensityOperator::qubits(ComplexMatrix::from_real_diagonal(&[(1.0 + p) / 2.0, (1.0 - p) / 2.0]))?;
        rho0 = rho0.tensor(&nuc);
    }
    let entangle = ghz_sequence(n_spins)?.unitary()?;
    let mut disentangle = PulseSequence::new(n_spins);
    for k in 0..n_spins {
        disentangle.push(GateEvent::conditional(k, Axis::X, -PI / 2.0))?;
    }
    disentangle.push(GateEvent::electron(Axis::Y, -PI / 2.0))?;
    let disentangle = disentangle.unitary()?;

    let prepared = rho0.conjugate_by(&entangle)?;
    let h = free_hamiltonian(bath, &spins);
    let d_env = 1usize << n_spins;
    let signal = tau_sweep
        .iter()
        .map(|&tau| {
            let u = unitary_propagator(&h, tau)?;
            let mut m = prepared.conjugate_by(&u)?.into_matrix();
            let decay = (-bath.electron_dephasing_rate * tau).exp();
            for i in 0..d_env {
                for j in 0..d_env {
                    m[(i, j + d_env)] *= decay;
                    m[(i + d_env, j)] *= decay;
                }
            }
            let fin = DensityOperator::qubits(m)?.conjugate_by(&disentangle)?;
            Ok((0..d_env).map(|i| fin.matrix()[(i, i)].re).sum())
        })
        .collect::<Result<Vec<f64>>>()?;

    let (frequencies_hz, spectrum) = magnitude_spectrum(&signal, dt);
    Ok(EchoResult { taus: tau_sweep.to_vec(), signal, frequencies_hz, spectrum, spins })
}

/// One-sided |DFT| of the mean-subtracted series; bins k/(n·dt) for k ≤ n/2.
pub fn magnitude_spectrum(signal: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2 + 1;
    let freqs = (0..half).map(|k| k as f64 / (n as f64 * dt)).collect();
    let mags = buf[..half].iter().map(|z| z.norm()).collect();
    (freqs, mags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bath::NuclearSpinParams;
    use crate::model::branch::to_density_operator;
    use crate::qmath::von_neumann_entropy;

    #[test]
    fn ghz_conditionals_are_orthogonal_y_states() {
        let bath = BathConfig::reference_register().fully_polarized();
        let s = ghz_protocol(&bath, 3).unwrap();
        assert!((s.p_up() - 0.5).abs() < 1e-15);
        for pair in s.conditional() {
            assert!(pair.overlap().norm() < 1e-15);
            assert!(overlap(&pair.up, &PureState::minus_y()).unwrap().norm() > 1.0 - 1e-12);
            assert!(overlap(&pair.down, &PureState::plus_y()).unwrap().norm() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn ghz_branch_state_matches_statevector() {
        let bath = BathConfig::reference_register().fully_polarized();
        let rho = to_density_operator(&ghz_protocol(&bath, 3).unwrap()).unwrap();
        let psi0 = PureState::basis(16, 0);
        let psi = ghz_sequence(3).unwrap().apply(&psi0).unwrap();
        let expected = DensityOperator::from_pure(&psi, vec![2; 4]).unwrap();
        assert!(rho.matrix().max_abs_diff(expected.matrix()) < 1e-12);
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-9);
    }

    #[test]
    fn ghz_size_checks() {
        let bath = BathConfig::reference_register();
        assert!(ghz_protocol(&bath, 5).is_err());
        assert!(ghz_protocol(&bath, 0).is_err());
        assert_eq!(ghz_protocol(&bath, 3).unwrap().polarizations(), &[0.75; 3]);
    }

    #[test]
    fn ramsey_closed_form() {
        let bath = BathConfig::reference_register();
        assert!((ramsey_signal(&bath, 0.0).unwrap().population - 1.0).abs() < 1e-15);
        for t in [1e-6, 5.35e-6, 12.0e-6] {
            let r = ramsey_signal(&bath, t).unwrap();
            let env: f64 = bath.spins.iter().map(|s| (PI * s.a_parallel_hz * t).cos()).product::<f64>()
                * (-1e5 * t).exp();
            assert!((r.coherence - env).abs() < 1e-12);
        }
        let first_zero = 1.0 / (2.0 * 93.5e3);
        assert!(ramsey_signal(&bath, first_zero).unwrap().coherence.abs() < 1e-12);
    }

    #[test]
    fn echo_closed_form() {
        let bath = BathConfig::reference_register();
        let taus: Vec<f64> = (0..16).map(|i| i as f64 * 0.1e-6).collect();
        let echo = loschmidt_echo_signal(&bath, 3, &taus).unwrap();
        assert_eq!(echo.spins, vec![0, 1, 3]);
        for (tau, s) in taus.iter().zip(&echo.signal) {
            let prod: f64 = echo
                .spins
                .iter()
                .map(|&k| (2.0 * PI * (bath.larmor_hz + bath.spins[k].a_parallel_hz / 2.0) * tau).cos())
                .product();
            let expected = 0.5 * (1.0 + (-1e5 * tau).exp() * prod);
            assert!((s - expected).abs() < 1e-10, "{tau}: {s} vs {expected}");
        }
    }

    #[test]
    fn echo_without_free_evolution_is_perfect() {
        let spins = vec![NuclearSpinParams::new(50e3, 10e3); 2];
        let bath = BathConfig::new(471e3, spins, 0.0).unwrap();
        let taus: Vec<f64> = (0..8).map(|i| i as f64 * 0.1e-6).collect();
        let echo = loschmidt_echo_signal(&bath, 2, &taus).unwrap();
        assert!((echo.signal[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn echo_rejects_short_or_uneven_sweeps() {
        let bath = BathConfig::reference_register();
        assert!(loschmidt_echo_signal(&bath, 3, &[0.0, 1e-7, 2e-7]).is_err());
        let uneven: Vec<f64> = (0..10).map(|i| (i * i) as f64 * 1e-8).collect();
        assert!(loschmidt_echo_signal(&bath, 3, &uneven).is_err());
    }

    #[test]
    fn spectrum_of_pure_tone() {
        let dt = 1e-7;
        let f = 50.0 / (256.0 * dt);
        let sig: Vec<f64> = (0..256).map(|i| (2.0 * PI * f * i as f64 * dt).cos()).collect();
        let (freqs, mags) = magnitude_spectrum(&sig, dt);
        let peak = mags.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(peak, 50);
        assert!((freqs[peak] - f).abs() < 1e-6);
    }
}
