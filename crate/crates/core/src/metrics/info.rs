use itertools::Itertools;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BranchedState, Pointer};
use crate::qmath::{binary_entropy, spectrum_entropy, von_neumann_entropy, ComplexMatrix, DensityOperator};

/// Environments up to this size are averaged over every fragment of a given size.
pub const EXACT_ENUMERATION_LIMIT: usize = 20;
/// Fragments drawn per size above [`EXACT_ENUMERATION_LIMIT`].
pub const SAMPLED_FRAGMENTS: usize = 2000;
/// Seed of the fragment sampler.
pub const FRAGMENT_SEED: u64 = 0x0DA2_3141;

/// Ordered subset of environment spin indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fragment {
    indices: Vec<usize>,
}

impl Fragment {
    pub fn new(indices: Vec<usize>, n_env: usize) -> Result<Self> {
        let mut seen = vec![false; n_env];
        for &k in &indices {
            if k >= n_env {
                return Err(Error::InvalidFragment(format!("spin {k} not in an environment of {n_env}")));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidFragment(format!("spin {k} listed twice")));
            }
        }
        Ok(Self { indices })
    }

    /// The whole environment.
    pub fn all(n_env: usize) -> Self {
        Self { indices: (0..n_env).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn complement(&self, n_env: usize) -> Vec<usize> {
        (0..n_env).filter(|k| !self.indices.contains(k)).collect()
    }
}

/// Entropies and information of one system/fragment split, all in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoBreakdown {
    pub mutual_information: f64,
    pub holevo: f64,
    pub discord: f64,
    pub h_s: f64,
    pub h_f: f64,
    pub h_sf: f64,
    /// (p_↑, p_↓)
    pub branch_probabilities: [f64; 2],
    /// (H_{F|↑}, H_{F|↓})
    pub conditional_entropies: [f64; 2],
}

impl InfoBreakdown {
    fn assemble(h_s: f64, h_f: f64, h_sf: f64, p: [f64; 2], h_cond: [f64; 2]) -> Self {
        let mutual_information = h_s + h_f - h_sf;
        let holevo = h_f - p[0] * h_cond[0] - p[1] * h_cond[1];
        Self {
            mutual_information,
            holevo,
            discord: mutual_information - holevo,
            h_s,
            h_f,
            h_sf,
            branch_probabilities: p,
            conditional_entropies: h_cond,
        }
    }

    fn empty(h_s: f64, p: [f64; 2]) -> Self {
        Self {
            mutual_information: 0.0,
            holevo: 0.0,
            discord: 0.0,
            h_s,
            h_f: 0.0,
            h_sf: h_s,
            branch_probabilities: p,
            conditional_entropies: [0.0, 0.0],
        }
    }
}

/// How fragment information is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InfoPath {
    /// Closed form when every conditional state is pure, explicit matrices otherwise.
    #[default]
    Auto,
    ClosedForm,
    Explicit,
}

fn check_joint(rho_sf: &DensityOperator) -> Result<()> {
    let dims = rho_sf.subsystem_dims();
    if dims.first() != Some(&2) {
        return Err(Error::DimensionMismatch(
            "joint state must have the pointer qubit as its first factor".into(),
        ));
    }
    Ok(())
}

/// I(S:F) = H_S + H_F - H_SF for a system-first joint state.
pub fn mutual_information(rho_sf: &DensityOperator) -> Result<f64> {
    check_joint(rho_sf)?;
    let n = rho_sf.subsystem_dims().len();
    let h_s = von_neumann_entropy(&rho_sf.partial_trace(&[0])?)?;
    let h_sf = von_neumann_entropy(rho_sf)?;
    let h_f = if n == 1 { 0.0 } else { von_neumann_entropy(&rho_sf.partial_trace(&(1..n).collect::<Vec<_>>())?)? };
    Ok(h_s + h_f - h_sf)
}

/// Full breakdown of a system-first joint state, pointer basis = S_z eigenstates.
pub fn info_from_joint(rho_sf: &DensityOperator) -> Result<InfoBreakdown> {
    check_joint(rho_sf)?;
    let dims = rho_sf.subsystem_dims();
    let h_s = von_neumann_entropy(&rho_sf.partial_trace(&[0])?)?;
    let m = rho_sf.matrix();
    let d = rho_sf.dim() / 2;
    let mut p = [0.0; 2];
    let mut h_cond = [0.0; 2];
    for s in Pointer::BOTH {
        let off = s.index() * d;
        let block = ComplexMatrix::from_fn(d, d, |i, j| m[(off + i, off + j)]);
        p[s.index()] = block.trace().re;
        if p[s.index()] > 0.0 {
            let cond = DensityOperator::new_unchecked(block.scale_real(1.0 / p[s.index()]), dims[1..].to_vec())?;
            h_cond[s.index()] = von_neumann_entropy(&cond)?;
        }
    }
    if dims.len() == 1 {
        return Ok(InfoBreakdown::empty(h_s, p));
    }
    let h_f = von_neumann_entropy(&rho_sf.partial_trace(&(1..dims.len()).collect::<Vec<_>>())?)?;
    let h_sf = von_neumann_entropy(rho_sf)?;
    Ok(InfoBreakdown::assemble(h_s, h_f, h_sf, p, h_cond))
}

/// χ = H_F - Σ_s p_s H_{F|s} of a system-first joint state.
pub fn holevo_from_joint(rho_sf: &DensityOperator) -> Result<f64> {
    Ok(info_from_joint(rho_sf)?.holevo)
}

/// Discord as the complement I - χ.
pub fn discord_from_joint(rho_sf: &DensityOperator) -> Result<f64> {
    Ok(info_from_joint(rho_sf)?.discord)
}

/// Entropy of [[p, x], [x*, q]] with p + q = 1 and |x|² = pq·|o|².
fn rank_two_entropy(p: f64, q: f64, o_abs: f64) -> f64 {
    let det = p * q * (1.0 - o_abs * o_abs).max(0.0);
    let disc = (1.0 - 4.0 * det).max(0.0).sqrt();
    let plus = 0.5 * (1.0 + disc);
    // Stable small eigenvalue from the determinant.
    let minus = if plus > 0.0 { det / plus } else { 0.0 };
    spectrum_entropy(&[plus, minus])
}

fn product_overlap(state: &BranchedState, spins: &[usize]) -> Complex64 {
    state.fragment_overlap(spins)
}

/// Closed-form breakdown for states whose conditional nuclear states are pure.
pub fn closed_form_info(state: &BranchedState, fragment: &Fragment) -> Result<InfoBreakdown> {
    if !state.has_pure_conditionals() {
        return Err(Error::NotApplicable("closed form needs every polarization equal to 1"));
    }
    let n = state.n_spins();
    Fragment::new(fragment.indices().to_vec(), n)?;
    let (p, q) = (state.p_up(), state.p_down());
    let c = state.electron_coherence().norm();
    let all: Vec<usize> = (0..n).collect();
    let h_s = rank_two_entropy(p, q, c * product_overlap(state, &all).norm());
    if fragment.is_empty() {
        return Ok(InfoBreakdown::empty(h_s, [p, q]));
    }
    let h_f = rank_two_entropy(p, q, product_overlap(state, fragment.indices()).norm());
    let h_sf = rank_two_entropy(p, q, c * product_overlap(state, &fragment.complement(n)).norm());
    Ok(InfoBreakdown::assemble(h_s, h_f, h_sf, [p, q], [0.0, 0.0]))
}

/// Breakdown from the explicit reduced density matrix of electron + fragment.
pub fn explicit_info(state: &BranchedState, fragment: &Fragment) -> Result<InfoBreakdown> {
    Fragment::new(fragment.indices().to_vec(), state.n_spins())?;
    info_from_joint(&state.joint_fragment_state(fragment.indices())?)
}

pub fn fragment_info(state: &BranchedState, fragment: &Fragment, path: InfoPath) -> Result<InfoBreakdown> {
    match path {
        InfoPath::ClosedForm => closed_form_info(state, fragment),
        InfoPath::Explicit => explicit_info(state, fragment),
        InfoPath::Auto if state.has_pure_conditionals() => closed_form_info(state, fragment),
        InfoPath::Auto => explicit_info(state, fragment),
    }
}

/// χ of one fragment; the empty fragment gives 0.
pub fn holevo(state: &BranchedState, fragment: &Fragment) -> Result<f64> {
    Ok(fragment_info(state, fragment, InfoPath::Auto)?.holevo)
}

pub fn discord(state: &BranchedState, fragment: &Fragment) -> Result<f64> {
    Ok(fragment_info(state, fragment, InfoPath::Auto)?.discord)
}

/// H(Π̂_S) for the branch weights of the state.
pub fn pointer_entropy(state: &BranchedState) -> f64 {
    binary_entropy(state.p_up())
}

/// Fragments of size `m` used for averaging: every subset in lexicographic
/// order up to [`EXACT_ENUMERATION_LIMIT`] spins, seeded samples beyond.
pub fn fragments_of_size(n_env: usize, m: usize) -> Result<Vec<Fragment>> {
    if m > n_env {
        return Err(Error::OutOfRange {
            name: "fragment size",
            detail: format!("{m} exceeds an environment of {n_env}"),
        });
    }
    if n_env <= EXACT_ENUMERATION_LIMIT {
        return Ok((0..n_env)
            .combinations(m)
            .map(|indices| Fragment { indices })
            .collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FRAGMENT_SEED);
    rng.set_stream(m as u64);
    Ok((0..SAMPLED_FRAGMENTS)
        .map(|_| {
            let mut indices = sample(&mut rng, n_env, m).into_vec();
            indices.sort_unstable();
            Fragment { indices }
        })
        .collect())
}

/// Averages over the fragments of one size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FragmentAverage {
    pub size: usize,
    pub holevo: f64,
    pub mutual_information: f64,
    pub discord: f64,
}

pub fn fragment_average(state: &BranchedState, m: usize, path: InfoPath) -> Result<FragmentAverage> {
    let fragments = fragments_of_size(state.n_spins(), m)?;
    let infos = fragments
        .par_iter()
        .map(|f| fragment_info(state, f, path))
        .collect::<Result<Vec<_>>>()?;
    let count = infos.len() as f64;
    let (mut chi, mut mi, mut disc) = (0.0, 0.0, 0.0);
    for info in &infos {
        chi += info.holevo;
        mi += info.mutual_information;
        disc += info.discord;
    }
    Ok(FragmentAverage {
        size: m,
        holevo: chi / count,
        mutual_information: mi / count,
        discord: disc / count,
    })
}

/// ⟨χ⟩ over fragments of size `m`.
pub fn fragment_average_chi(state: &BranchedState, m: usize, path: InfoPath) -> Result<f64> {
    Ok(fragment_average(state, m, path)?.holevo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evolve_branches, ghz_protocol, initial_branched_state, BathConfig};
    use std::f64::consts::PI;

    fn evolved(t: f64) -> BranchedState {
        let bath = BathConfig::reference_register().fully_polarized().with_dephasing_rate(0.0);
        evolve_branches(&initial_branched_state(&bath), &bath, t).unwrap()
    }

    fn bell() -> DensityOperator {
        let m = ComplexMatrix::from_real_rows(&[
            &[0.5, 0.0, 0.0, 0.5],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.5, 0.0, 0.0, 0.5],
        ])
        .unwrap();
        DensityOperator::qubits(m).unwrap()
    }

    #[test]
    fn mutual_information_examples() {
        let prod = DensityOperator::maximally_mixed(vec![2, 2]);
        assert!(mutual_information(&prod).unwrap().abs() < 1e-12);
        assert!((mutual_information(&bell()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn discord_examples() {
        let cc = DensityOperator::qubits(ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        assert!(discord_from_joint(&cc).unwrap().abs() < 1e-12);
        assert!((discord_from_joint(&bell()).unwrap() - 1.0).abs() < 1e-12);
        assert!((holevo_from_joint(&bell()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn initial_state_has_no_information() {
        let s = evolved(0.0);
        for m in 0..=4 {
            assert!(fragment_average_chi(&s, m, InfoPath::Auto).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn single_spin_closed_form() {
        let t = 14.5e-6;
        let s = evolved(t);
        for (k, spin) in BathConfig::reference_register().spins.iter().enumerate() {
            let o = (PI * spin.a_parallel_hz * t).cos().abs();
            let expected = binary_entropy((1.0 + o) / 2.0);
            let f = Fragment::new(vec![k], 4).unwrap();
            assert!((holevo(&s, &f).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_plateau_and_uptick() {
        let bath = BathConfig::reference_register().fully_polarized();
        let s = ghz_protocol(&bath, 3).unwrap();
        for m in 1..=3 {
            assert!((fragment_average_chi(&s, m, InfoPath::Explicit).unwrap() - 1.0).abs() < 1e-9);
        }
        let full = fragment_info(&s, &Fragment::all(3), InfoPath::Explicit).unwrap();
        assert!((full.mutual_information - 2.0).abs() < 1e-9);
        assert!((full.discord - 1.0).abs() < 1e-9);
    }

    #[test]
    fn paths_agree() {
        for t in [1.3e-6, 6.0e-6, 14.5e-6, 20.2e-6] {
            let s = evolved(t);
            for m in 0..=4 {
                for f in fragments_of_size(4, m).unwrap() {
                    let a = closed_form_info(&s, &f).unwrap();
                    let b = explicit_info(&s, &f).unwrap();
                    assert!((a.holevo - b.holevo).abs() < 1e-10);
                    assert!((a.mutual_information - b.mutual_information).abs() < 1e-10);
                    assert!((a.h_sf - b.h_sf).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn closed_form_rejects_mixed_conditionals() {
        let bath = BathConfig::reference_register();
        let s = initial_branched_state(&bath);
        assert!(matches!(
            closed_form_info(&s, &Fragment::all(4)),
            Err(Error::NotApplicable(_))
        ));
        assert!(fragment_info(&s, &Fragment::all(4), InfoPath::Auto).is_ok());
    }

    #[test]
    fn fragment_validation() {
        assert!(Fragment::new(vec![0, 0], 4).is_err());
        assert!(Fragment::new(vec![4], 4).is_err());
        assert!(fragments_of_size(4, 5).is_err());
        assert_eq!(fragments_of_size(4, 2).unwrap().len(), 6);
    }

    #[test]
    fn sampled_fragments_are_deterministic() {
        let a = fragments_of_size(30, 7).unwrap();
        let b = fragments_of_size(30, 7).unwrap();
        assert_eq!(a.len(), SAMPLED_FRAGMENTS);
        assert_eq!(a, b);
        assert!(a.iter().all(|f| f.len() == 7));
    }
}
