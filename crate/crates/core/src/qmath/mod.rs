//! Dense complex linear algebra for Hilbert spaces of at most 2¹² dimensions.
//!
//! Subsystems are ordered system spin first, then nuclear spins in bath order.
//! Entropies are in bits.

mod eigen;
mod matrix;
mod state;

pub use eigen::{
    hermitian_eigensystem, hermitian_eigenvalues, unitary_propagator, Eigensystem, EIGEN_CLAMP,
    HERMITIAN_INPUT_TOL,
};
pub use matrix::{pauli_x, pauli_y, pauli_z, tensor_all, tensor_product, ComplexMatrix, I, ONE, ZERO};
pub use state::{
    binary_entropy, matrix_fractional_power, overlap, spectrum_entropy, von_neumann_entropy,
    DensityOperator, PureState, DENSITY_TOL, NORM_TOL,
};

/// Largest supported register, electron included.
pub const MAX_QUBITS: usize = 12;
