//! Adaptive XY (AXY) dynamical-decoupling design: filter coefficients, pulse
//! timings for a target first-harmonic strength, and the conditional gates they
//! generate on a single addressed nucleus.

mod filter;
mod gates;

pub use filter::{
    coupling_bound, designs_to_csv, filter_coefficient, solvable_bound, solve_timings, validate_coupling,
    FilterDesign, DESIGN_CSV_HEADER, ROOT_TOL, THETA_MAX,
};
pub use gates::{
    effective_hamiltonian, entangling_gate, gate_for_angle, iswap_sequence, resonance_spacing, EffectiveCoupling,
    EntanglingGate, PULSES_PER_UNIT,
};
