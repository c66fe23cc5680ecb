use std::f64::consts::PI;

use num_complex::Complex64;

use super::bath::BathConfig;
use crate::error::{Error, Result};
use crate::qmath::{overlap, ComplexMatrix, DensityOperator, PureState, MAX_QUBITS};

/// Pointer level of the central spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pointer {
    Up,
    Down,
}

impl Pointer {
    pub const BOTH: [Pointer; 2] = [Pointer::Up, Pointer::Down];

    pub fn index(self) -> usize {
        match self {
            Pointer::Up => 0,
            Pointer::Down => 1,
        }
    }
}

/// Conditional states of one nuclear spin in the two pointer branches.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPair {
    pub up: PureState,
    pub down: PureState,
}

impl ConditionalPair {
    pub fn get(&self, s: Pointer) -> &PureState {
        match s {
            Pointer::Up => &self.up,
            Pointer::Down => &self.down,
        }
    }

    /// ⟨φ↑|φ↓⟩
    pub fn overlap(&self) -> Complex64 {
        overlap(&self.up, &self.down).expect("qubit states")
    }
}

/// Direction of the polarization normalization applied to a nuclear 2×2 state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarizationDirection {
    /// Divide coherences by P (normalize measured data).
    Correct,
    /// Multiply coherences by P (synthesize imperfectly polarized data).
    Synthesize,
}

/// State of the form Σ_s √p_s |s⟩ ⊗_k |φ_{k|s}⟩ with an extra electron
/// coherence factor and per-spin polarizations.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchedState {
    p_up: f64,
    p_down: f64,
    conditional: Vec<ConditionalPair>,
    polarizations: Vec<f64>,
    electron_coherence: Complex64,
}

const PROBABILITY_TOL: f64 = 1e-12;

impl BranchedState {
    pub fn new(
        p_up: f64,
        p_down: f64,
        conditional: Vec<ConditionalPair>,
        polarizations: Vec<f64>,
        electron_coherence: Complex64,
    ) -> Result<Self> {
        if !(p_up >= 0.0 && p_down >= 0.0) || (p_up + p_down - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::OutOfRange {
                name: "branch probabilities",
                detail: format!("p_up = {p_up}, p_down = {p_down}"),
            });
        }
        if polarizations.len() != conditional.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} polarizations for {} spins",
                polarizations.len(),
                conditional.len()
            )));
        }
        if let Some(p) = polarizations.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::OutOfRange {
                name: "polarization",
                detail: format!("{p} not in (0, 1]"),
            });
        }
        if conditional.iter().any(|c| c.up.dim() != 2 || c.down.dim() != 2) {
            return Err(Error::DimensionMismatch("conditional states must be qubits".into()));
        }
        if electron_coherence.norm() > 1.0 + PROBABILITY_TOL {
            return Err(Error::OutOfRange {
                name: "electron coherence",
                detail: format!("|c| = {} exceeds 1", electron_coherence.norm()),
            });
        }
        Ok(Self {
            p_up,
            p_down,
            conditional,
            polarizations,
            electron_coherence,
        })
    }

    pub fn p_up(&self) -> f64 {
        self.p_up
    }

    pub fn p_down(&self) -> f64 {
        self.p_down
    }

    pub fn probability(&self, s: Pointer) -> f64 {
        match s {
            Pointer::Up => self.p_up,
            Pointer::Down => self.p_down,
        }
    }

    pub fn conditional(&self) -> &[ConditionalPair] {
        &self.conditional
    }

    pub fn polarizations(&self) -> &[f64] {
        &self.polarizations
    }

    pub fn electron_coherence(&self) -> Complex64 {
        self.electron_coherence
    }

    pub fn n_spins(&self) -> usize {
        self.conditional.len()
    }

    /// True when every conditional nuclear state is pure (all P_k = 1).
    pub fn has_pure_conditionals(&self) -> bool {
        self.polarizations.iter().all(|&p| p == 1.0)
    }

    /// True when the global state is pure.
    pub fn is_pure(&self) -> bool {
        self.has_pure_conditionals() && (self.electron_coherence.norm() - 1.0).abs() <= PROBABILITY_TOL
    }

    pub fn with_polarizations(&self, polarizations: Vec<f64>) -> Result<Self> {
        Self::new(
            self.p_up,
            self.p_down,
            self.conditional.clone(),
            polarizations,
            self.electron_coherence,
        )
    }

    /// Copy with every polarization set to 1.
    pub fn fully_polarized(&self) -> Self {
        let mut s = self.clone();
        s.polarizations.iter_mut().for_each(|p| *p = 1.0);
        s
    }

    /// Π_P(|φ_{k|s}⟩⟨φ_{k|s'}|): the cross operator of spin k with its coherences scaled by P_k.
    pub(crate) fn spin_block(&self, k: usize, s: Pointer, s2: Pointer) -> ComplexMatrix {
        let pair = &self.conditional[k];
        let mut m = ComplexMatrix::outer(pair.get(s).amplitudes(), pair.get(s2).amplitudes());
        scale_coherences(&mut m, self.polarizations[k]);
        m
    }

    fn branch_weight(&self, s: Pointer, s2: Pointer) -> Complex64 {
        match (s, s2) {
            (Pointer::Up, Pointer::Up) => Complex64::new(self.p_up, 0.0),
            (Pointer::Down, Pointer::Down) => Complex64::new(self.p_down, 0.0),
            (Pointer::Up, Pointer::Down) => self.electron_coherence * (self.p_up * self.p_down).sqrt(),
            (Pointer::Down, Pointer::Up) => {
                self.electron_coherence.conj() * (self.p_up * self.p_down).sqrt()
            }
        }
    }

    fn check_fragment(&self, fragment: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.n_spins()];
        for &k in fragment {
            if k >= self.n_spins() {
                return Err(Error::InvalidFragment(format!(
                    "spin {k} not in an environment of {}",
                    self.n_spins()
                )));
            }
            if seen[k] {
                return Err(Error::InvalidFragment(format!("spin {k} listed twice")));
            }
            seen[k] = true;
        }
        if 1 + fragment.len() > MAX_QUBITS {
            return Err(Error::DimensionOverflow {
                qubits: 1 + fragment.len(),
                max: MAX_QUBITS,
            });
        }
        Ok(())
    }

    /// Unnormalized block ⟨s|ρ_SF|s'⟩ on the fragment, with the rest of the environment traced out.
    fn fragment_block(&self, fragment: &[usize], s: Pointer, s2: Pointer) -> ComplexMatrix {
        let mut weight = self.branch_weight(s, s2);
        if s != s2 {
            for k in (0..self.n_spins()).filter(|k| !fragment.contains(k)) {
                // tr Π_P(|a⟩⟨b|) = ⟨b|a⟩
                let pair = &self.conditional[k];
                weight *= overlap(pair.get(s2), pair.get(s)).expect("qubit states");
            }
        }
        let mut m = ComplexMatrix::identity(1);
        for &k in fragment {
            m = m.kron(&self.spin_block(k, s, s2));
        }
        m.scale(weight)
    }

    /// Reduced state of the electron and the listed spins (electron first).
    pub fn joint_fragment_state(&self, fragment: &[usize]) -> Result<DensityOperator> {
        self.check_fragment(fragment)?;
        let d = 1usize << fragment.len();
        let mut full = ComplexMatrix::zeros(2 * d, 2 * d);
        for s in Pointer::BOTH {
            for s2 in Pointer::BOTH {
                let block = self.fragment_block(fragment, s, s2);
                let (r0, c0) = (s.index() * d, s2.index() * d);
                for i in 0..d {
                    for j in 0..d {
                        full[(r0 + i, c0 + j)] = block[(i, j)];
                    }
                }
            }
        }
        DensityOperator::new_unchecked(full, vec![2; 1 + fragment.len()])
    }

    /// ρ_{F|s} = ⊗_{k∈F} Π_P(|φ_{k|s}⟩⟨φ_{k|s}|).
    pub fn conditional_fragment_state(&self, fragment: &[usize], s: Pointer) -> Result<DensityOperator> {
        self.check_fragment(fragment)?;
        let mut m = ComplexMatrix::identity(1);
        for &k in fragment {
            m = m.kron(&self.spin_block(k, s, s));
        }
        DensityOperator::new_unchecked(m, vec![2; fragment.len()])
    }

    /// Product over the listed spins of ⟨φ_{k|↑}|φ_{k|↓}⟩.
    pub fn fragment_overlap(&self, fragment: &[usize]) -> Complex64 {
        fragment
            .iter()
            .map(|&k| self.conditional[k].overlap())
            .product()
    }
}

/// Scales the off-diagonal entries of a 2×2 matrix.
fn scale_coherences(m: &mut ComplexMatrix, factor: f64) {
    m[(0, 1)] *= factor;
    m[(1, 0)] *= factor;
}

/// Electron in |+⟩, every nuclear spin in its initial state in both branches.
pub fn initial_branched_state(bath: &BathConfig) -> BranchedState {
    let conditional = bath
        .spins
        .iter()
        .map(|s| ConditionalPair {
            up: s.initial_state.clone(),
            down: s.initial_state.clone(),
        })
        .collect();
    BranchedState {
        p_up: 0.5,
        p_down: 0.5,
        conditional,
        polarizations: bath.polarizations(),
        electron_coherence: Complex64::new(1.0, 0.0),
    }
}

/// e^{-iθ I_z} on a qubit state.
pub(crate) fn rotate_z(state: &PureState, theta: f64) -> PureState {
    let a = state.amplitudes();
    PureState::normalized(vec![
        a[0] * Complex64::new(0.0, -theta / 2.0).exp(),
        a[1] * Complex64::new(0.0, theta / 2.0).exp(),
    ])
    .expect("rotation preserves norm")
}

/// Free evolution under the pure-decoherence Hamiltonian for `t` seconds.
///
/// Only the ↑ branch rotates (shifted S_z); the electron coherence decays as e^{-γt}.
pub fn evolve_branches(state: &BranchedState, bath: &BathConfig, t: f64) -> Result<BranchedState> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfRange {
            name: "t",
            detail: format!("evolution time must be non-negative, got {t}"),
        });
    }
    if bath.len() != state.n_spins() {
        return Err(Error::DimensionMismatch(format!(
            "bath has {} spins, state has {}",
            bath.len(),
            state.n_spins()
        )));
    }
    let conditional = state
        .conditional
        .iter()
        .zip(&bath.spins)
        .map(|(pair, spin)| ConditionalPair {
            up: rotate_z(&pair.up, 2.0 * PI * spin.a_parallel_hz * t),
            down: pair.down.clone(),
        })
        .collect();
    let decay = (-bath.electron_dephasing_rate * t).exp();
    Ok(BranchedState {
        conditional,
        electron_coherence: state.electron_coherence * decay,
        ..state.clone()
    })
}

/// Full 2^(1+N) density matrix with polarization-scaled nuclear coherences.
pub fn to_density_operator(state: &BranchedState) -> Result<DensityOperator> {
    let all: Vec<usize> = (0..state.n_spins()).collect();
    state.joint_fragment_state(&all)
}

/// Applies or removes the polarization scaling of a single nuclear 2×2 state.
pub fn polarization_correction(
    rho_k: &DensityOperator,
    p: f64,
    direction: PolarizationDirection,
) -> Result<DensityOperator> {
    if rho_k.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "polarization correction acts on a qubit, got dimension {}",
            rho_k.dim()
        )));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::OutOfRange {
            name: "polarization",
            detail: format!("{p} not in (0, 1]"),
        });
    }
    let factor = match direction {
        PolarizationDirection::Correct => 1.0 / p,
        PolarizationDirection::Synthesize => p,
    };
    let mut m = rho_k.matrix().clone();
    scale_coherences(&mut m, factor);
    DensityOperator::new(m, vec![2])
}

/// ⟨↑|ρ_S|↑⟩ of a dense electron-first density matrix.
pub fn pointer_population(rho: &DensityOperator) -> Result<f64> {
    let red = rho.partial_trace(&[0])?;
    Ok(red.matrix()[(0, 0)].re)
}
