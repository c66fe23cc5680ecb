use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{chernoff_summary, fragment_average, fragment_info, Fragment, InfoPath};
use crate::model::{
    evolve_branches, ghz_protocol, initial_branched_state, ramsey_signal, BathConfig, BranchedState, RamseySignal,
};
use crate::numfmt::format_sig;

pub const SURFACE_CSV_HEADER: &str = "time_us,fragment_size,chi_bits,mi_bits,discord_bits";
pub const CURVE_CSV_HEADER: &str = "time_us,value";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepMetadata {
    pub bath: BathConfig,
    pub seed: Option<u64>,
    /// True when every polarization was set to 1 before the sweep.
    pub polarization_corrected: bool,
}

/// ⟨χ⟩, ⟨I⟩ and ⟨D⟩ over a time × fragment-size grid; rows are times.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub times: Vec<f64>,
    pub fragment_sizes: Vec<usize>,
    pub chi_surface: Vec<Vec<f64>>,
    pub mi_surface: Vec<Vec<f64>>,
    pub discord_surface: Vec<Vec<f64>>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SURFACE_CSV_HEADER}\n");
        for (i, &t) in self.times.iter().enumerate() {
            for (j, &m) in self.fragment_sizes.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    format_sig(t * 1e6),
                    m,
                    format_sig(self.chi_surface[i][j]),
                    format_sig(self.mi_surface[i][j]),
                    format_sig(self.discord_surface[i][j]),
                );
            }
        }
        out
    }
}

/// "time_us,value" rows.
pub fn curve_to_csv(times: &[f64], values: &[f64]) -> String {
    let mut out = format!("{CURVE_CSV_HEADER}\n");
    for (t, v) in times.iter().zip(values) {
        let _ = writeln!(out, "{},{}", format_sig(t * 1e6), format_sig(*v));
    }
    out
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::OutOfRange { name: "times", detail: "time grid is empty".into() });
    }
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::OutOfRange { name: "times", detail: "times must be finite and non-negative".into() });
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange { name: "times", detail: "times must be strictly ascending".into() });
    }
    Ok(())
}

/// Branched state of the bath after free evolution for `t`.
pub fn evolved_state(bath: &BathConfig, t: f64) -> Result<BranchedState> {
    evolve_branches(&initial_branched_state(bath), bath, t)
}

/// Fragment-averaged information over `times` × sizes 0..=max_fragment.
///
/// `corrected = true` sets every polarization to 1; otherwise each spin's
/// coherences are scaled by its P_k.
pub fn holevo_surface(
    bath: &BathConfig,
    times: &[f64],
    max_fragment: usize,
    corrected: bool,
    path: InfoPath,
) -> Result<SweepResult> {
    check_times(times)?;
    if max_fragment > bath.len() {
        return Err(Error::OutOfRange {
            name: "max_fragment",
            detail: format!("{max_fragment} exceeds a bath of {} spins", bath.len()),
        });
    }
    let used = if corrected { bath.fully_polarized() } else { bath.clone() };
    let fragment_sizes: Vec<usize> = (0..=max_fragment).collect();
    let rows = times
        .par_iter()
        .map(|&t| {
            let state = evolved_state(&used, t)?;
            fragment_sizes
                .iter()
                .map(|&m| fragment_average(&state, m, path))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let pick = |f: fn(&crate::metrics::FragmentAverage) -> f64| -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.iter().map(f).collect()).collect()
    };
    Ok(SweepResult {
        times: times.to_vec(),
        chi_surface: pick(|a| a.holevo),
        mi_surface: pick(|a| a.mutual_information),
        discord_surface: pick(|a| a.discord),
        fragment_sizes,
        metadata: SweepMetadata { bath: used, seed: None, polarization_corrected: corrected },
    })
}

/// ⟨χ⟩(m) of the GHZ protocol state, with and without polarization correction.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzPlateau {
    /// Bath indices of the entangled spins, strongest first.
    pub spins: Vec<usize>,
    pub fragment_sizes: Vec<usize>,
    pub chi_corrected: Vec<f64>,
    pub chi_uncorrected: Vec<f64>,
    /// χ of the whole entangled register without correction.
    pub whole_register_uncorrected: f64,
}

/// `polarizations` overrides the bath values of the chosen spins when given.
pub fn ghz_plateau(bath: &BathConfig, n_spins: usize, polarizations: Option<&[f64]>) -> Result<GhzPlateau> {
    let raw = ghz_protocol(bath, n_spins)?;
    let raw = match polarizations {
        Some(p) => raw.with_polarizations(p.to_vec())?,
        None => raw,
    };
    let ideal = raw.fully_polarized();
    let fragment_sizes: Vec<usize> = (0..=n_spins).collect();
    let curve = |s: &BranchedState| -> Result<Vec<f64>> {
        fragment_sizes
            .iter()
            .map(|&m| Ok(fragment_average(s, m, InfoPath::Explicit)?.holevo))
            .collect()
    };
    let whole = fragment_info(&raw, &Fragment::all(n_spins), InfoPath::Explicit)?.holevo;
    Ok(GhzPlateau {
        spins: bath.strongest(n_spins),
        chi_corrected: curve(&ideal)?,
        chi_uncorrected: curve(&raw)?,
        fragment_sizes,
        whole_register_uncorrected: whole,
    })
}

/// ξ̄(t) in nats: mean Chernoff information of the per-spin conditional pairs.
pub fn chernoff_curve(bath: &BathConfig, times: &[f64]) -> Result<Vec<f64>> {
    check_times(times)?;
    times
        .par_iter()
        .map(|&t| Ok(chernoff_summary(&evolved_state(bath, t)?, 0.5)?.xi_bar))
        .collect()
}

pub fn ramsey_curve(bath: &BathConfig, times: &[f64]) -> Result<Vec<RamseySignal>> {
    check_times(times)?;
    times.iter().map(|&t| ramsey_signal(bath, t)).collect()
}
