use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sweeps::{check_times, evolved_state};
use crate::error::{Error, Result};
use crate::metrics::{chernoff_summary, record_count};
use crate::model::{BathConfig, NuclearSpinParams, GYROMAGNETIC_RATIO_C13, REFERENCE_FIELD_T};

/// Diamond cubic lattice constant, nm.
pub const LATTICE_CONSTANT_NM: f64 = 0.357;

/// (μ₀/4π)·γ_e·γ_n·ħ/2π for an electron and a ¹³C nucleus, Hz·nm³.
pub const DIPOLAR_PREFACTOR_HZ_NM3: f64 = 1e-7 * 1.760_859_63e11 * 6.728_284e7 * 1.054_571_817e-34
    / (2.0 * std::f64::consts::PI)
    * 1e27;

/// Draws per realization before giving up on an empty bath.
pub const MAX_REDRAWS: usize = 100;

pub const DEFAULT_REALIZATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomBathSpec {
    /// ¹³C fraction in (0, 1].
    pub concentration: f64,
    /// nm
    pub lattice_radius: f64,
    pub seed: u64,
    pub n_realizations: usize,
    pub initial_polarization: f64,
    pub larmor_hz: f64,
    pub dephasing_rate: f64,
}

impl RandomBathSpec {
    pub fn new(concentration: f64, lattice_radius: f64, seed: u64) -> Self {
        Self {
            concentration,
            lattice_radius,
            seed,
            n_realizations: DEFAULT_REALIZATIONS,
            initial_polarization: 1.0,
            larmor_hz: REFERENCE_FIELD_T * GYROMAGNETIC_RATIO_C13,
            dephasing_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |detail: String| Err(Error::OutOfRange { name: "random bath", detail });
        if !(self.concentration > 0.0 && self.concentration <= 1.0) {
            return bad(format!("concentration {} not in (0, 1]", self.concentration));
        }
        if !(self.lattice_radius > 0.0) || !self.lattice_radius.is_finite() {
            return bad(format!("lattice radius {} nm must be positive", self.lattice_radius));
        }
        if self.n_realizations == 0 {
            return bad("at least one realization is required".into());
        }
        if !(self.initial_polarization > 0.0 && self.initial_polarization <= 1.0) {
            return bad(format!("polarization {} not in (0, 1]", self.initial_polarization));
        }
        Ok(())
    }
}

/// Carbon sites within `radius` nm of the vacancy, in nm, NV frame
/// (z along [111]); the vacancy and its nearest-neighbour shell are excluded.
pub fn lattice_sites(radius: f64) -> Vec<[f64; 3]> {
    let a = LATTICE_CONSTANT_NM;
    let basis = [
        [0.0, 0.0, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
        [0.5, 0.5, 0.0],
    ];
    let nn = a * 3f64.sqrt() / 4.0;
    let cells = (radius / a).ceil() as i64 + 1;
    let mut sites = Vec::new();
    for i in -cells..=cells {
        for j in -cells..=cells {
            for k in -cells..=cells {
                for b in basis {
                    for shift in [0.0, 0.25] {
                        let p = [
                            a * (i as f64 + b[0] + shift),
                            a * (j as f64 + b[1] + shift),
                            a * (k as f64 + b[2] + shift),
                        ];
                        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                        if r <= radius && r > nn * 1.01 {
                            sites.push(p);
                        }
                    }
                }
            }
        }
    }
    sites
}

/// Secular point-dipole couplings (A∥, |A⊥|) in Hz for a site at `p` nm.
pub fn dipolar_coupling(p: [f64; 3]) -> (f64, f64) {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let cos = (p[0] + p[1] + p[2]) / (3f64.sqrt() * r);
    let sin = (1.0 - cos * cos).max(0.0).sqrt();
    let scale = DIPOLAR_PREFACTOR_HZ_NM3 / (r * r * r);
    (scale * (1.0 - 3.0 * cos * cos), scale * 3.0 * (sin * cos).abs())
}

fn draw(spec: &RandomBathSpec, sites: &[[f64; 3]], realization: usize) -> Result<BathConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(realization as u64);
    for _ in 0..MAX_REDRAWS {
        let spins: Vec<NuclearSpinParams> = sites
            .iter()
            .filter(|_| rng.random::<f64>() < spec.concentration)
            .map(|&p| {
                let (par, perp) = dipolar_coupling(p);
                NuclearSpinParams::new(par, perp).with_polarization(spec.initial_polarization)
            })
            .collect();
        if !spins.is_empty() {
            return BathConfig::new(spec.larmor_hz, spins, spec.dephasing_rate);
        }
    }
    Err(Error::InvalidBath(format!(
        "no ¹³C drawn in {MAX_REDRAWS} attempts (concentration {}, radius {} nm)",
        spec.concentration, spec.lattice_radius
    )))
}

/// `n_realizations` baths; realization i uses stream i of the seeded generator.
pub fn generate_random_bath(spec: &RandomBathSpec) -> Result<Vec<BathConfig>> {
    spec.validate()?;
    let sites = lattice_sites(spec.lattice_radius);
    if sites.is_empty() {
        return Err(Error::InvalidBath(format!("no lattice sites within {} nm", spec.lattice_radius)));
    }
    (0..spec.n_realizations)
        .into_par_iter()
        .map(|i| draw(spec, &sites, i))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordCurve {
    pub times: Vec<f64>,
    /// Mean over realizations.
    pub mean: Vec<f64>,
    /// [realization][time]
    pub per_realization: Vec<Vec<f64>>,
    pub bath_sizes: Vec<usize>,
}

/// Record count ξ̄·♯E/ln(1/δ) over time, averaged over random baths.
pub fn record_count_vs_time(spec: &RandomBathSpec, times: &[f64], delta: f64) -> Result<RecordCurve> {
    check_times(times)?;
    record_count(0.0, 1, delta)?;
    let baths = generate_random_bath(spec)?;
    let per_realization = baths
        .par_iter()
        .map(|bath| {
            times
                .iter()
                .map(|&t| Ok(chernoff_summary(&evolved_state(bath, t)?, delta)?.record_count.value))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let n = per_realization.len() as f64;
    let mean = (0..times.len())
        .map(|j| per_realization.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    Ok(RecordCurve {
        times: times.to_vec(),
        mean,
        per_realization,
        bath_sizes: baths.iter().map(BathConfig::len).collect(),
    })
}
