use num_complex::Complex64;

use super::bath::{build_hamiltonian, BathConfig};
use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, DensityOperator, ZERO};

/// Largest accepted trace drift over a full integration.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

/// Integration scheme for [`evolve_lindblad`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LindbladMethod {
    /// Elementwise closed form when H and every L are diagonal, RK4 otherwise.
    #[default]
    Auto,
    /// Fixed-step fourth-order Runge-Kutta.
    Rk4,
}

/// dρ/dt = -i[H, ρ] + Σ (LρL† - ½{L†L, ρ}).
fn lindblad_rhs(h: &ComplexMatrix, jumps: &[(ComplexMatrix, ComplexMatrix, ComplexMatrix)], rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = h.commutator(rho)?.scale(Complex64::new(0.0, -1.0));
    for (l, ldag, ldl) in jumps {
        let a = l.matmul(rho)?.matmul(ldag)?;
        let b = ldl.matmul(rho)?;
        let c = rho.matmul(ldl)?;
        out = &(&out + &a) - &(&b + &c).scale_real(0.5);
    }
    Ok(out)
}

/// Jump operator √(γ/2) σ_z on the electron, identity elsewhere.
///
/// Gives e^{-γt} decay of the electron coherence.
pub fn electron_dephasing_operator(bath: &BathConfig) -> Result<ComplexMatrix> {
    bath.check_dense_size()?;
    let d_env = 1usize << bath.len();
    let amp = (bath.electron_dephasing_rate / 2.0).sqrt();
    let diag: Vec<Complex64> = (0..2 * d_env)
        .map(|i| Complex64::new(if i < d_env { amp } else { -amp }, 0.0))
        .collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

fn rk4_step_size(h: &ComplexMatrix, rate: f64, bath: &BathConfig) -> f64 {
    let n = h.rows();
    // Gershgorin bound on the spread of the Hamiltonian spectrum.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| h[(i, j)].norm()).sum();
        lo = lo.min(h[(i, i)].re - radius);
        hi = hi.max(h[(i, i)].re + radius);
    }
    let omega_max = (hi - lo) + rate;
    let mut step = f64::INFINITY;
    let a_max = bath.max_abs_parallel();
    if a_max > 0.0 {
        step = step.min(1.0 / (50.0 * a_max));
    }
    if omega_max > 0.0 {
        step = step.min(0.005 / omega_max);
    }
    step
}

/// Evolves ρ(0) under the pure-decoherence Hamiltonian with electron dephasing for `t` seconds.
pub fn evolve_lindblad(
    rho0: &DensityOperator,
    bath: &BathConfig,
    t: f64,
    method: LindbladMethod,
) -> Result<DensityOperator> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfRange {
            name: "t",
            detail: format!("evolution time must be non-negative, got {t}"),
        });
    }
    let h = build_hamiltonian(bath)?;
    if rho0.dim() != h.rows() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} against Hamiltonian dimension {}",
            rho0.dim(),
            h.rows()
        )));
    }
    let l = electron_dephasing_operator(bath)?;
    let dims = rho0.subsystem_dims().to_vec();
    let trace0 = rho0.matrix().trace().re;

    let out = if method == LindbladMethod::Auto && h.is_diagonal(0.0) && l.is_diagonal(0.0) {
        evolve_diagonal(rho0.matrix(), &h, &l, t)
    } else {
        evolve_rk4(rho0.matrix(), &h, &l, bath, t)?
    };

    if out.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Integrator("state became non-finite".into()));
    }
    let drift = (out.trace().re - trace0).abs();
    if drift > TRACE_DRIFT_TOL {
        return Err(Error::Integrator(format!("trace drifted by {drift:e}")));
    }
    DensityOperator::new_unchecked(out, dims)
}

/// ρ_ij(t) = ρ_ij(0) exp(-i(h_i - h_j)t + (l_i l_j* - ½|l_i|² - ½|l_j|²)t).
fn evolve_diagonal(rho: &ComplexMatrix, h: &ComplexMatrix, l: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let hd = h.diagonal();
    let ld = l.diagonal();
    ComplexMatrix::from_fn(rho.rows(), rho.cols(), |i, j| {
        let r = rho[(i, j)];
        if r == ZERO {
            return ZERO;
        }
        let gen = Complex64::new(0.0, -(hd[i].re - hd[j].re))
            + ld[i] * ld[j].conj()
            - 0.5 * (ld[i].norm_sqr() + ld[j].norm_sqr());
        r * (gen * t).exp()
    })
}

fn evolve_rk4(
    rho0: &ComplexMatrix,
    h: &ComplexMatrix,
    l: &ComplexMatrix,
    bath: &BathConfig,
    t: f64,
) -> Result<ComplexMatrix> {
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let ldag = l.adjoint();
    let ldl = ldag.matmul(l)?;
    let jumps = vec![(l.clone(), ldag, ldl)];
    let max_step = rk4_step_size(h, bath.electron_dephasing_rate, bath);
    let steps = if max_step.is_finite() { (t / max_step).ceil().max(1.0) as usize } else { 1 };
    let dt = t / steps as f64;
    let mut rho = rho0.clone();
    for _ in 0..steps {
        let k1 = lindblad_rhs(h, &jumps, &rho)?;
        let k2 = lindblad_rhs(h, &jumps, &(&rho + &k1.scale_real(dt / 2.0)))?;
        let k3 = lindblad_rhs(h, &jumps, &(&rho + &k2.scale_real(dt / 2.0)))?;
        let k4 = lindblad_rhs(h, &jumps, &(&rho + &k3.scale_real(dt)))?;
        let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        rho = &rho + &incr.scale_real(dt / 6.0);
        if rho.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Integrator("state became non-finite".into()));
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bath::NuclearSpinParams;
    use crate::model::branch::{evolve_branches, initial_branched_state, to_density_operator};

    fn single(a: f64, gamma: f64) -> BathConfig {
        BathConfig::new(471e3, vec![NuclearSpinParams::new(a, 0.0)], gamma).unwrap()
    }

    #[test]
    fn pure_dephasing_of_electron_coherence() {
        let bath = single(0.0, 1e5);
        let rho0 = to_density_operator(&initial_branched_state(&bath)).unwrap();
        let t = 10e-6;
        for method in [LindbladMethod::Auto, LindbladMethod::Rk4] {
            let rho = evolve_lindblad(&rho0, &bath, t, method).unwrap();
            let e = rho.partial_trace(&[0]).unwrap();
            let c = 2.0 * e.matrix()[(0, 1)].norm();
            assert!((c - (-1.0f64).exp()).abs() < 1e-6, "{method:?}: {c}");
        }
    }

    #[test]
    fn matches_branch_evolution() {
        let bath = BathConfig::reference_register();
        let s0 = initial_branched_state(&bath);
        let rho0 = to_density_operator(&s0).unwrap();
        let t = 3.7e-6;
        let expected = to_density_operator(&evolve_branches(&s0, &bath, t).unwrap()).unwrap();
        let exact = evolve_lindblad(&rho0, &bath, t, LindbladMethod::Auto).unwrap();
        assert!(exact.matrix().max_abs_diff(expected.matrix()) < 1e-12);
    }

    #[test]
    fn rk4_agrees_with_exact() {
        let bath = BathConfig::new(
            471e3,
            vec![NuclearSpinParams::new(93.5e3, 0.0), NuclearSpinParams::new(-26.3e3, 0.0)],
            1e5,
        )
        .unwrap();
        let rho0 = to_density_operator(&initial_branched_state(&bath)).unwrap();
        let t = 5e-6;
        let a = evolve_lindblad(&rho0, &bath, t, LindbladMethod::Auto).unwrap();
        let b = evolve_lindblad(&rho0, &bath, t, LindbladMethod::Rk4).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-8);
    }

    #[test]
    fn zero_time_and_dimension_checks() {
        let bath = single(1e3, 1e5);
        let rho0 = to_density_operator(&initial_branched_state(&bath)).unwrap();
        let same = evolve_lindblad(&rho0, &bath, 0.0, LindbladMethod::Rk4).unwrap();
        assert_eq!(same.matrix(), rho0.matrix());
        assert!(evolve_lindblad(&rho0, &bath, -1.0, LindbladMethod::Auto).is_err());
        let two = BathConfig::new(471e3, vec![NuclearSpinParams::new(1e3, 0.0); 2], 0.0).unwrap();
        assert!(matches!(
            evolve_lindblad(&rho0, &two, 1e-6, LindbladMethod::Auto),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
