use std::f64::consts::PI;

use super::filter::{validate_coupling, FilterDesign};
use crate::error::{Error, Result};
use crate::model::{Axis, GateEvent, NuclearSpinParams, PulseSequence};
use crate::qmath::{pauli_x, pauli_z, unitary_propagator, ComplexMatrix};

/// Pulses per AXY-8 unit; a run of N units lasts 8·N·τ.
pub const PULSES_PER_UNIT: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoupling {
    /// f_DD·A⊥/2, Hz.
    pub strength: f64,
    pub target_spin: usize,
}

impl EffectiveCoupling {
    pub fn new(f_dd: f64, spin: &NuclearSpinParams, target_spin: usize) -> Result<Self> {
        validate_coupling(f_dd)?;
        Ok(Self { strength: f_dd * spin.a_perp_hz / 2.0, target_spin })
    }

    /// Rotation rate of the nucleus in either pointer branch, Hz (±strength/2).
    pub fn conditional_rate(&self) -> f64 {
        self.strength / 2.0
    }
}

/// ½ f_DD A⊥ (S_z − ½) ⊗ I_x in Hz, electron first; (S_z − ½) = diag(½, −½).
pub fn effective_hamiltonian(f_dd: f64, spin: &NuclearSpinParams) -> Result<ComplexMatrix> {
    validate_coupling(f_dd)?;
    let sz_shift = pauli_z().scale_real(0.5);
    let ix = pauli_x().scale_real(0.5);
    Ok(sz_shift.kron(&ix).scale_real(0.5 * f_dd * spin.a_perp_hz))
}

/// Interpulse spacing that puts the filter centre 1/(2τ) on ν_L + A∥/2.
pub fn resonance_spacing(larmor_hz: f64, a_parallel_hz: f64) -> Result<f64> {
    let nu = larmor_hz + a_parallel_hz / 2.0;
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::OutOfRange {
            name: "effective frequency",
            detail: format!("ν_L + A∥/2 = {nu} Hz must be positive"),
        });
    }
    Ok(1.0 / (2.0 * nu))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntanglingGate {
    /// exp(i·2π·H·T) on electron ⊗ nucleus.
    pub unitary: ComplexMatrix,
    /// Conditional rotation angle φ = 2π (f_DD A⊥/4) T: the ↑ branch turns by
    /// R_x(−φ) and the ↓ branch by R_x(φ).
    pub angle: f64,
    /// Gate time T, s.
    pub duration: f64,
}

fn gate_for_duration(design: &FilterDesign, spin: &NuclearSpinParams, duration: f64) -> Result<EntanglingGate> {
    let h = effective_hamiltonian(design.f_dd, spin)?.scale_real(2.0 * PI);
    let unitary = unitary_propagator(&h, -duration)?;
    let angle = 2.0 * PI * design.f_dd * spin.a_perp_hz / 4.0 * duration;
    Ok(EntanglingGate { unitary, angle, duration })
}

/// Gate accumulated over N AXY-8 units of the design.
pub fn entangling_gate(design: &FilterDesign, spin: &NuclearSpinParams, repetitions: u32) -> Result<EntanglingGate> {
    gate_for_duration(design, spin, PULSES_PER_UNIT * repetitions as f64 * design.tau)
}

/// Gate whose accumulated conditional angle equals `angle`; the duration is
/// not rounded to whole units.
pub fn gate_for_angle(design: &FilterDesign, spin: &NuclearSpinParams, angle: f64) -> Result<EntanglingGate> {
    let rate = 2.0 * PI * design.f_dd * spin.a_perp_hz / 4.0;
    if angle == 0.0 {
        return gate_for_duration(design, spin, 0.0);
    }
    if rate == 0.0 {
        return Err(Error::OutOfRange {
            name: "angle",
            detail: format!("zero effective coupling cannot accumulate angle {angle}"),
        });
    }
    let duration = angle / rate;
    if duration < 0.0 {
        return Err(Error::OutOfRange {
            name: "angle",
            detail: format!("angle {angle} has the opposite sign of the coupling; flip f_dd"),
        });
    }
    gate_for_duration(design, spin, duration)
}

/// Electron pulses around two conditional gates realizing
/// exp(i(π/2)σ_x I_x)·exp(i(π/2)σ_y I_y) on electron ⊗ nucleus.
pub fn iswap_sequence(design: &FilterDesign, spin: &NuclearSpinParams) -> Result<PulseSequence> {
    // Both conditional gates turn by π/2; fail early if the design cannot.
    gate_for_angle(design, spin, (PI / 2.0) * design.f_dd.signum())?;
    let half = PI / 2.0;
    PulseSequence::from_events(
        1,
        vec![
            GateEvent::electron(Axis::X, half),
            GateEvent::conditional(0, Axis::Y, -half),
            GateEvent::electron(Axis::X, -half),
            GateEvent::electron(Axis::Y, -half),
            GateEvent::conditional(0, Axis::X, -half),
            GateEvent::electron(Axis::Y, half),
        ],
    )
}
