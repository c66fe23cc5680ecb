use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, PureState, MAX_QUBITS};

/// ¹³C gyromagnetic ratio, Hz/T.
pub const GYROMAGNETIC_RATIO_C13: f64 = 10.705e6;

/// Bias field of the reference register, tesla (440 G).
pub const REFERENCE_FIELD_T: f64 = 0.044;

/// Default electron dephasing rate of the reference register, 1/s.
pub const REFERENCE_DEPHASING_RATE: f64 = 1.0e5;

/// Typical nuclear polarization reached by polarization swapping.
pub const REFERENCE_POLARIZATION: f64 = 0.75;

/// Parallel and perpendicular hyperfine couplings of the four-spin register, Hz.
pub const REFERENCE_COUPLINGS: [(f64, f64); 4] = [
    (93.5e3, 45.8e3),
    (49.5e3, 35.3e3),
    (-26.3e3, 22.0e3),
    (-47.1e3, 42.5e3),
];

/// One nuclear spin coupled to the electron.
#[derive(Debug, Clone, PartialEq)]
pub struct NuclearSpinParams {
    /// Signed parallel hyperfine coupling, Hz.
    pub a_parallel_hz: f64,
    /// Perpendicular hyperfine magnitude, Hz.
    pub a_perp_hz: f64,
    /// Initial polarization in (0, 1].
    pub polarization: f64,
    pub initial_state: PureState,
}

impl NuclearSpinParams {
    pub fn new(a_parallel_hz: f64, a_perp_hz: f64) -> Self {
        Self {
            a_parallel_hz,
            a_perp_hz,
            polarization: 1.0,
            initial_state: PureState::plus(),
        }
    }

    pub fn with_polarization(mut self, polarization: f64) -> Self {
        self.polarization = polarization;
        self
    }

    pub fn with_initial_state(mut self, state: PureState) -> Self {
        self.initial_state = state;
        self
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !self.a_parallel_hz.is_finite() {
            return Err(Error::InvalidBath(format!("spins[{index}].a_parallel_hz is not finite")));
        }
        if !(self.a_perp_hz >= 0.0) || !self.a_perp_hz.is_finite() {
            return Err(Error::InvalidBath(format!(
                "spins[{index}].a_perp_hz must be a non-negative magnitude, got {}",
                self.a_perp_hz
            )));
        }
        if !(self.polarization > 0.0 && self.polarization <= 1.0) {
            return Err(Error::InvalidBath(format!(
                "spins[{index}].polarization must lie in (0, 1], got {}",
                self.polarization
            )));
        }
        if self.initial_state.dim() != 2 {
            return Err(Error::InvalidBath(format!(
                "spins[{index}].initial_state must be a qubit state"
            )));
        }
        Ok(())
    }
}

/// Central electron plus an ordered list of nuclear spins.
#[derive(Debug, Clone, PartialEq)]
pub struct BathConfig {
    /// Bare ¹³C precession frequency, Hz.
    pub larmor_hz: f64,
    pub spins: Vec<NuclearSpinParams>,
    /// Pure-dephasing rate of the electron coherence, 1/s.
    pub electron_dephasing_rate: f64,
    /// Hz/T, used for field to Larmor conversion.
    pub gyromagnetic_ratio_c13: f64,
}

impl BathConfig {
    pub fn new(larmor_hz: f64, spins: Vec<NuclearSpinParams>, electron_dephasing_rate: f64) -> Result<Self> {
        let bath = Self {
            larmor_hz,
            spins,
            electron_dephasing_rate,
            gyromagnetic_ratio_c13: GYROMAGNETIC_RATIO_C13,
        };
        bath.validate()?;
        Ok(bath)
    }

    /// Larmor frequency set by a bias field in tesla.
    pub fn from_field(field_t: f64, spins: Vec<NuclearSpinParams>, electron_dephasing_rate: f64) -> Result<Self> {
        Self::new(field_t * GYROMAGNETIC_RATIO_C13, spins, electron_dephasing_rate)
    }

    /// The measured four-spin register at 440 G, nuclei prepared in |+⟩ with
    /// the typical 75 % polarization.
    pub fn reference_register() -> Self {
        let spins = REFERENCE_COUPLINGS
            .iter()
            .map(|&(par, perp)| NuclearSpinParams::new(par, perp).with_polarization(REFERENCE_POLARIZATION))
            .collect();
        Self::from_field(REFERENCE_FIELD_T, spins, REFERENCE_DEPHASING_RATE)
            .expect("reference register is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.larmor_hz > 0.0) || !self.larmor_hz.is_finite() {
            return Err(Error::InvalidBath(format!("larmor_hz must be positive, got {}", self.larmor_hz)));
        }
        if !(self.electron_dephasing_rate >= 0.0) || !self.electron_dephasing_rate.is_finite() {
            return Err(Error::InvalidBath(format!(
                "dephasing_rate_hz must be non-negative, got {}",
                self.electron_dephasing_rate
            )));
        }
        if self.spins.is_empty() {
            return Err(Error::InvalidBath("at least one nuclear spin is required".into()));
        }
        self.spins.iter().enumerate().try_for_each(|(i, s)| s.validate(i))
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn polarizations(&self) -> Vec<f64> {
        self.spins.iter().map(|s| s.polarization).collect()
    }

    /// Copy with every polarization set to 1 (the polarization-corrected view).
    pub fn fully_polarized(&self) -> Self {
        let mut bath = self.clone();
        bath.spins.iter_mut().for_each(|s| s.polarization = 1.0);
        bath
    }

    pub fn with_dephasing_rate(&self, rate: f64) -> Self {
        let mut bath = self.clone();
        bath.electron_dephasing_rate = rate;
        bath
    }

    pub fn with_uniform_polarization(&self, p: f64) -> Self {
        let mut bath = self.clone();
        bath.spins.iter_mut().for_each(|s| s.polarization = p);
        bath
    }

    /// Indices of the `n` spins with the largest |A∥|, strongest first; ties keep bath order.
    pub fn strongest(&self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.spins.len()).collect();
        idx.sort_by(|&a, &b| {
            self.spins[b]
                .a_parallel_hz
                .abs()
                .total_cmp(&self.spins[a].a_parallel_hz.abs())
        });
        idx.truncate(n);
        idx
    }

    /// Sub-bath made of the listed spins, in the listed order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let spins = indices
            .iter()
            .map(|&i| {
                self.spins.get(i).cloned().ok_or_else(|| {
                    Error::InvalidFragment(format!("spin {i} not in a bath of {}", self.spins.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut bath = self.clone();
        bath.spins = spins;
        bath.validate()?;
        Ok(bath)
    }

    pub fn max_abs_parallel(&self) -> f64 {
        self.spins.iter().map(|s| s.a_parallel_hz.abs()).fold(0.0, f64::max)
    }

    pub(crate) fn check_dense_size(&self) -> Result<()> {
        let qubits = 1 + self.spins.len();
        if qubits > MAX_QUBITS {
            return Err(Error::DimensionOverflow { qubits, max: MAX_QUBITS });
        }
        Ok(())
    }
}

/// Pure-decoherence Hamiltonian 2π S_z Σ_k A∥ᵏ I_zᵏ in rad/s, with S_z = |↑⟩⟨↑|.
///
/// Basis index: electron bit outermost (↑ = 0), then nuclear spins in bath
/// order, each with |0⟩ = m_I = +½.
pub fn build_hamiltonian(bath: &BathConfig) -> Result<ComplexMatrix> {
    bath.check_dense_size()?;
    let n = bath.spins.len();
    let d_env = 1usize << n;
    let mut diag = vec![Complex64::new(0.0, 0.0); 2 * d_env];
    for (e, slot) in diag.iter_mut().take(d_env).enumerate() {
        let mut acc = 0.0;
        for (k, spin) in bath.spins.iter().enumerate() {
            let bit = (e >> (n - 1 - k)) & 1;
            let iz = if bit == 0 { 0.5 } else { -0.5 };
            acc += spin.a_parallel_hz * iz;
        }
        *slot = Complex64::new(2.0 * std::f64::consts::PI * acc, 0.0);
    }
    Ok(ComplexMatrix::from_diagonal(&diag))
}
