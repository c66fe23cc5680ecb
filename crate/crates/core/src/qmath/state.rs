use num_complex::Complex64;

use super::eigen::{hermitian_eigensystem, EIGEN_CLAMP};
use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const DENSITY_TOL: f64 = 1e-10;

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails only for the zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn zero() -> Self {
        Self::basis(2, 0)
    }

    pub fn one() -> Self {
        Self::basis(2, 1)
    }

    pub fn plus() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { amplitudes: vec![s, s] }
    }

    pub fn minus() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { amplitudes: vec![s, -s] }
    }

    pub fn plus_y() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)],
        }
    }

    pub fn minus_y() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: vec![Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&a| other.amplitudes.iter().map(move |&b| a * b))
            .collect();
        PureState { amplitudes }
    }

    /// Applies a matrix assumed unitary; the result is renormalized against drift.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<PureState> {
        PureState::normalized(u.apply(&self.amplitudes)?)
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

/// ⟨a|b⟩, conjugate-linear in `a`.
pub fn overlap(a: &PureState, b: &PureState) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "overlap of states with dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Hermitian, unit-trace, positive-semidefinite matrix with a factor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    subsystem_dims: Vec<usize>,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, subsystem_dims: Vec<usize>) -> Result<Self> {
        let rho = Self::new_unchecked(matrix, subsystem_dims)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only shapes; for matrices that are valid by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, subsystem_dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let product: usize = subsystem_dims.iter().product();
        if product != matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dims {subsystem_dims:?} do not multiply to {}",
                matrix.rows()
            )));
        }
        Ok(Self { matrix, subsystem_dims })
    }

    /// Single-factor layout.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.rows();
        Self::new(matrix, vec![n])
    }

    pub fn qubits(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.rows();
        if !n.is_power_of_two() || n == 0 {
            return Err(Error::DimensionMismatch(format!("{n} is not a power of two")));
        }
        Self::new(matrix, vec![2; n.trailing_zeros() as usize])
    }

    pub fn from_pure(state: &PureState, subsystem_dims: Vec<usize>) -> Result<Self> {
        Self::new_unchecked(state.projector(), subsystem_dims)
    }

    pub fn maximally_mixed(subsystem_dims: Vec<usize>) -> Self {
        let n: usize = subsystem_dims.iter().product();
        Self {
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            subsystem_dims,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dev = self.matrix.hermitian_deviation();
        if dev > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("Hermitian deviation {dev:.3e}")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < -EIGEN_CLAMP {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigensystem(&self.matrix)?.values)
    }

    /// Kronecker product; `self` factors come first.
    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let mut dims = self.subsystem_dims.clone();
        dims.extend_from_slice(&other.subsystem_dims);
        DensityOperator {
            matrix: self.matrix.kron(&other.matrix),
            subsystem_dims: dims,
        }
    }

    /// Reduced state on `keep`, in the original subsystem order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let count = self.subsystem_dims.len();
        let mut kept = vec![false; count];
        for &k in keep {
            if k >= count {
                return Err(Error::SubsystemOutOfRange { index: k, count });
            }
            if kept[k] {
                return Err(Error::InvalidFragment(format!("subsystem {k} listed twice")));
            }
            kept[k] = true;
        }
        let dims = &self.subsystem_dims;
        let kept_dims: Vec<usize> = (0..count).filter(|&i| kept[i]).map(|i| dims[i]).collect();
        let traced_dims: Vec<usize> = (0..count).filter(|&i| !kept[i]).map(|i| dims[i]).collect();
        let d_keep: usize = kept_dims.iter().product();
        let d_trace: usize = traced_dims.iter().product();

        // strides of each subsystem in the full index
        let mut strides = vec![1usize; count];
        for i in (0..count.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let offsets = |local: usize, which: bool| -> usize {
            // which = true: decompose `local` over kept subsystems
            let mut rem = local;
            let mut full = 0;
            for i in (0..count).rev() {
                if kept[i] == which {
                    full += (rem % dims[i]) * strides[i];
                    rem /= dims[i];
                }
            }
            full
        };
        let keep_off: Vec<usize> = (0..d_keep).map(|a| offsets(a, true)).collect();
        let trace_off: Vec<usize> = (0..d_trace).map(|e| offsets(e, false)).collect();

        let mut out = ComplexMatrix::zeros(d_keep, d_keep);
        for (a, &ka) in keep_off.iter().enumerate() {
            for (b, &kb) in keep_off.iter().enumerate() {
                let mut acc = ZERO;
                for &t in &trace_off {
                    acc += self.matrix[(ka + t, kb + t)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityOperator {
            matrix: out,
            subsystem_dims: kept_dims,
        })
    }

    /// U ρ U†
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<DensityOperator> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Self::new_unchecked(m, self.subsystem_dims.clone())
    }
}

/// -p log2 p, with 0 log 0 = 0.
fn entropy_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy in bits of a spectrum; entries in [-1e-10, 0) are clamped to 0.
pub fn spectrum_entropy(values: &[f64]) -> f64 {
    values.iter().map(|&l| entropy_term(l.max(0.0))).sum()
}

/// h₂(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_term(p) + entropy_term(1.0 - p)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let values = rho.eigenvalues()?;
    if let Some(&min) = values.first() {
        if min < -EIGEN_CLAMP {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
    }
    Ok(spectrum_entropy(&values))
}

/// ρ^c for c in [0, 1]; clamped-zero eigenvalues map to 0 (so ρ^0 is the support projector).
pub fn matrix_fractional_power(rho: &DensityOperator, c: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange {
            name: "c",
            detail: format!("{c} not in [0, 1]"),
        });
    }
    let eig = hermitian_eigensystem(rho.matrix())?;
    Ok(eig.reconstruct_with(|l| {
        if l <= EIGEN_CLAMP {
            ZERO
        } else {
            Complex64::new(l.powf(c), 0.0)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::matrix::pauli_z;

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![
            Complex64::new(s, 0.0),
            ZERO,
            ZERO,
            Complex64::new(s, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn trace_out_product_state() {
        let psi = PureState::basis(4, 0);
        let rho = DensityOperator::from_pure(&psi, vec![2, 2]).unwrap();
        let red = rho.partial_trace(&[0]).unwrap();
        assert_eq!(red.matrix(), &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
    }

    #[test]
    fn trace_out_bell_pair() {
        let rho = DensityOperator::from_pure(&bell(), vec![2, 2]).unwrap();
        let red = rho.partial_trace(&[1]).unwrap();
        assert!(red.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn trace_everything_is_scalar_one() {
        let rho = DensityOperator::from_pure(&bell(), vec![2, 2]).unwrap();
        let red = rho.partial_trace(&[]).unwrap();
        assert_eq!(red.dim(), 1);
        assert!((red.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_index_errors() {
        let rho = DensityOperator::from_pure(&bell(), vec![2, 2]).unwrap();
        assert_eq!(
            rho.partial_trace(&[2]),
            Err(Error::SubsystemOutOfRange { index: 2, count: 2 })
        );
        assert!(rho.partial_trace(&[0, 0]).is_err());
    }

    #[test]
    fn partial_trace_keeps_original_order() {
        let a = DensityOperator::from_pure(&PureState::zero(), vec![2]).unwrap();
        let b = DensityOperator::from_pure(&PureState::plus(), vec![2]).unwrap();
        let c = DensityOperator::from_pure(&PureState::one(), vec![2]).unwrap();
        let abc = a.tensor(&b).tensor(&c);
        let red = abc.partial_trace(&[2, 0]).unwrap();
        assert!(red.matrix().max_abs_diff(a.tensor(&c).matrix()) < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityOperator::from_pure(&PureState::plus(), vec![2]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let mixed = DensityOperator::maximally_mixed(vec![2]);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-14);
        let biased =
            DensityOperator::from_matrix(ComplexMatrix::from_real_diagonal(&[0.8, 0.2])).unwrap();
        let h = von_neumann_entropy(&biased).unwrap();
        assert!((h - 0.721_928_094_887_362_3).abs() < 1e-14, "{h}");
    }

    #[test]
    fn fractional_power_examples() {
        let rho =
            DensityOperator::from_matrix(ComplexMatrix::from_real_diagonal(&[0.25, 0.75])).unwrap();
        let half = matrix_fractional_power(&rho, 0.5).unwrap();
        assert!(
            half.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.75f64.sqrt()])) < 1e-14
        );
        let one = matrix_fractional_power(&rho, 1.0).unwrap();
        assert!(one.max_abs_diff(rho.matrix()) < 1e-14);

        let pure = DensityOperator::from_pure(&PureState::plus(), vec![2]).unwrap();
        let support = matrix_fractional_power(&pure, 0.0).unwrap();
        assert!(support.max_abs_diff(pure.matrix()) < 1e-14);

        assert!(matches!(
            matrix_fractional_power(&rho, 1.5),
            Err(Error::OutOfRange { name: "c", .. })
        ));
    }

    #[test]
    fn overlap_examples() {
        let plus = PureState::plus();
        assert!((overlap(&plus, &plus).unwrap() - ONE).norm() < 1e-15);
        assert_eq!(overlap(&PureState::zero(), &PureState::one()).unwrap(), ZERO);
        let theta: f64 = 0.7;
        let u = crate::qmath::unitary_propagator(&pauli_z().scale_real(0.5), theta).unwrap();
        let rotated = plus.evolve(&u).unwrap();
        let o = overlap(&plus, &rotated).unwrap();
        assert!((o.re - (theta / 2.0).cos()).abs() < 1e-15 && o.im.abs() < 1e-15);
        assert!(overlap(&plus, &PureState::basis(4, 0)).is_err());
    }

    #[test]
    fn invalid_density_rejected() {
        let m = ComplexMatrix::from_real_diagonal(&[1.2, -0.2]);
        assert!(matches!(DensityOperator::from_matrix(m), Err(Error::InvalidDensity(_))));
        let m = ComplexMatrix::from_real_diagonal(&[0.6, 0.6]);
        assert!(matches!(DensityOperator::from_matrix(m), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn unnormalized_state_rejected() {
        assert!(PureState::new(vec![ONE, ONE]).is_err());
        assert!(PureState::normalized(vec![ZERO, ZERO]).is_err());
    }
}
