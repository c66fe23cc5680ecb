use num_complex::Complex64;

use super::branch::Pointer;
use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, DensityOperator, PureState, MAX_QUBITS, ZERO};

/// Rotation axis. `Phase(φ)` is the equatorial axis cos φ x̂ + sin φ ŷ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    X,
    Y,
    Z,
    Phase(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateTarget {
    Electron,
    /// Rotation of nuclear spin k, optionally restricted to one pointer branch.
    Nuclear(usize),
    /// exp(-iθ σ_z ⊗ I_axis) on nuclear spin k: R(θ) in the ↑ branch, R(-θ) in the ↓ branch.
    ConditionalNuclear(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateEvent {
    pub target: GateTarget,
    pub axis: Axis,
    /// Rotation angle in rad; R(θ) = exp(-iθ σ·n/2).
    pub angle: f64,
    /// Only meaningful for `Nuclear`: act in this pointer branch only.
    pub condition: Option<Pointer>,
}

impl GateEvent {
    pub fn electron(axis: Axis, angle: f64) -> Self {
        Self { target: GateTarget::Electron, axis, angle, condition: None }
    }

    pub fn nuclear(k: usize, axis: Axis, angle: f64) -> Self {
        Self { target: GateTarget::Nuclear(k), axis, angle, condition: None }
    }

    pub fn nuclear_if(k: usize, s: Pointer, axis: Axis, angle: f64) -> Self {
        Self { target: GateTarget::Nuclear(k), axis, angle, condition: Some(s) }
    }

    pub fn conditional(k: usize, axis: Axis, angle: f64) -> Self {
        Self { target: GateTarget::ConditionalNuclear(k), axis, angle, condition: None }
    }
}

/// exp(-iθ σ·n/2) for the given axis.
pub fn rotation(axis: Axis, angle: f64) -> ComplexMatrix {
    let c = Complex64::new((angle / 2.0).cos(), 0.0);
    let s = (angle / 2.0).sin();
    let mi = Complex64::new(0.0, -s);
    let m = match axis {
        Axis::X => [[c, mi], [mi, c]],
        Axis::Y => [[c, Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), c]],
        Axis::Z => [
            [Complex64::new(0.0, -angle / 2.0).exp(), ZERO],
            [ZERO, Complex64::new(0.0, angle / 2.0).exp()],
        ],
        Axis::Phase(phi) => {
            let e = Complex64::new(0.0, -phi).exp();
            [[c, mi * e], [mi * e.conj(), c]]
        }
    };
    ComplexMatrix::from_fn(2, 2, |i, j| m[i][j])
}

/// Time-ordered gate list for an electron and `n_nuclei` nuclear spins.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    n_nuclei: usize,
    events: Vec<GateEvent>,
}

impl PulseSequence {
    pub fn new(n_nuclei: usize) -> Self {
        Self { n_nuclei, events: Vec::new() }
    }

    pub fn from_events(n_nuclei: usize, events: Vec<GateEvent>) -> Result<Self> {
        let mut seq = Self::new(n_nuclei);
        for e in events {
            seq.push(e)?;
        }
        Ok(seq)
    }

    pub fn push(&mut self, event: GateEvent) -> Result<()> {
        if !event.angle.is_finite() {
            return Err(Error::OutOfRange {
                name: "gate angle",
                detail: format!("{} is not finite", event.angle),
            });
        }
        if let Axis::Phase(phi) = event.axis {
            if !phi.is_finite() {
                return Err(Error::OutOfRange { name: "gate phase", detail: format!("{phi} is not finite") });
            }
        }
        match event.target {
            GateTarget::Nuclear(k) | GateTarget::ConditionalNuclear(k) if k >= self.n_nuclei => {
                return Err(Error::InvalidFragment(format!(
                    "gate targets spin {k} in a register of {}",
                    self.n_nuclei
                )));
            }
            _ => {}
        }
        self.events.push(event);
        Ok(())
    }

    /// Appends another sequence on the same register.
    pub fn then(mut self, other: &PulseSequence) -> Result<Self> {
        for &e in &other.events {
            self.push(e)?;
        }
        Ok(self)
    }

    pub fn events(&self) -> &[GateEvent] {
        &self.events
    }

    pub fn n_nuclei(&self) -> usize {
        self.n_nuclei
    }

    pub fn dim(&self) -> usize {
        1 << (1 + self.n_nuclei)
    }

    fn check_size(&self) -> Result<()> {
        if 1 + self.n_nuclei > MAX_QUBITS {
            return Err(Error::DimensionOverflow { qubits: 1 + self.n_nuclei, max: MAX_QUBITS });
        }
        Ok(())
    }

    /// Applies the sequence to a statevector, electron first.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        self.check_size()?;
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} on a register of dimension {}",
                state.dim(),
                self.dim()
            )));
        }
        let mut amps = state.amplitudes().to_vec();
        for e in &self.events {
            self.apply_event(e, &mut amps);
        }
        PureState::normalized(amps)
    }

    fn apply_event(&self, e: &GateEvent, amps: &mut [Complex64]) {
        let n = self.n_nuclei;
        let d_env = 1usize << n;
        match e.target {
            GateTarget::Electron => {
                let r = rotation(e.axis, e.angle);
                for j in 0..d_env {
                    apply_pair(&r, amps, j, j + d_env);
                }
            }
            GateTarget::Nuclear(k) | GateTarget::ConditionalNuclear(k) => {
                let stride = 1usize << (n - 1 - k);
                for s in Pointer::BOTH {
                    let angle = match (e.target, e.condition) {
                        (GateTarget::ConditionalNuclear(_), _) if s == Pointer::Down => -e.angle,
                        (GateTarget::ConditionalNuclear(_), _) => e.angle,
                        (_, Some(c)) if c != s => continue,
                        _ => e.angle,
                    };
                    let r = rotation(e.axis, angle);
                    let base = s.index() * d_env;
                    for j in 0..d_env {
                        if j & stride == 0 {
                            apply_pair(&r, amps, base + j, base + j + stride);
                        }
                    }
                }
            }
        }
    }

    /// Full unitary of the sequence.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        self.check_size()?;
        let d = self.dim();
        let mut u = ComplexMatrix::zeros(d, d);
        let mut col = vec![ZERO; d];
        for j in 0..d {
            col.iter_mut().for_each(|z| *z = ZERO);
            col[j] = Complex64::new(1.0, 0.0);
            for e in &self.events {
                self.apply_event(e, &mut col);
            }
            for i in 0..d {
                u[(i, j)] = col[i];
            }
        }
        Ok(u)
    }

    /// U ρ U†.
    pub fn apply_density(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        rho.conjugate_by(&self.unitary()?)
    }

    /// Reverses the order and negates every angle.
    pub fn inverse(&self) -> Self {
        let events = self
            .events
            .iter()
            .rev()
            .map(|e| GateEvent { angle: -e.angle, ..*e })
            .collect();
        Self { n_nuclei: self.n_nuclei, events }
    }
}

fn apply_pair(r: &ComplexMatrix, amps: &mut [Complex64], i0: usize, i1: usize) {
    let (a, b) = (amps[i0], amps[i1]);
    amps[i0] = r[(0, 0)] * a + r[(0, 1)] * b;
    amps[i1] = r[(1, 0)] * a + r[(1, 1)] * b;
}
