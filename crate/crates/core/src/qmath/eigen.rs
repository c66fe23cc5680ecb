use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Largest |m - m†| entry accepted by [`hermitian_eigensystem`].
pub const HERMITIAN_INPUT_TOL: f64 = 1e-8;

/// Eigenvalues at or above `-EIGEN_CLAMP` are treated as round-off around zero.
pub const EIGEN_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`.
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// V f(Λ) V†
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            if fv[k] == ZERO {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * fv[k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| Complex64::new(l, 0.0))
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized as (m + m†)/2 before the solve, so deviations
/// below [`HERMITIAN_INPUT_TOL`] do not leak into the spectrum.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigensystem of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation();
    if !(dev <= HERMITIAN_INPUT_TOL) {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows();
    if n == 1 {
        return Ok(Eigensystem {
            values: vec![m[(0, 0)].re],
            vectors: ComplexMatrix::identity(1),
        });
    }
    let sym = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = nalgebra::linalg::SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen(format!("no convergence for {n}x{n} matrix")))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigensystem(m)?.values)
}

/// exp(-i t H) for Hermitian H.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if h.is_diagonal(0.0) {
        let d: Vec<Complex64> = h
            .diagonal()
            .into_iter()
            .map(|e| Complex64::new(0.0, -t * e.re).exp())
            .collect();
        return Ok(ComplexMatrix::from_diagonal(&d));
    }
    let eig = hermitian_eigensystem(h)?;
    Ok(eig.reconstruct_with(|l| Complex64::new(0.0, -t * l).exp()))
}
