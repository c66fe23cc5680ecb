//! Central electron spin coupled to a nuclear spin bath by pure-decoherence
//! hyperfine interactions, plus the gate-level protocols run on it.

mod bath;
mod branch;
mod lindblad;
mod protocols;
mod pulses;

pub use bath::{
    build_hamiltonian, BathConfig, NuclearSpinParams, GYROMAGNETIC_RATIO_C13, REFERENCE_COUPLINGS,
    REFERENCE_DEPHASING_RATE, REFERENCE_FIELD_T, REFERENCE_POLARIZATION,
};
pub use branch::{
    evolve_branches, initial_branched_state, pointer_population, polarization_correction,
    to_density_operator, BranchedState, ConditionalPair, Pointer, PolarizationDirection,
};
pub use lindblad::{electron_dephasing_operator, evolve_lindblad, LindbladMethod, TRACE_DRIFT_TOL};
pub use protocols::{
    ghz_protocol, ghz_sequence, loschmidt_echo_signal, magnitude_spectrum, ramsey_signal, EchoResult,
    RamseySignal, MIN_ECHO_POINTS,
};
pub use pulses::{rotation, Axis, GateEvent, GateTarget, PulseSequence};
