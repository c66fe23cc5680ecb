use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::model::{BathConfig, NuclearSpinParams};
use crate::qmath::PureState;

/// The reference four-spin register shipped with the tool.
pub const BUNDLED_BATH: &str = include_str!("../../data/reference_bath.toml");

/// On-disk bath layout. Couplings in Hz, rates in 1/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathFile {
    pub larmor_hz: f64,
    #[serde(default)]
    pub dephasing_rate_hz: f64,
    pub spins: Vec<SpinEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinEntry {
    pub a_parallel_hz: f64,
    pub a_perp_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<f64>,
    /// One of "+", "-", "0", "1", "+y", "-y"; defaults to "+".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<String>,
}

fn parse_state(label: &str, index: usize) -> Result<PureState, CliError> {
    Ok(match label {
        "+" => PureState::plus(),
        "-" => PureState::minus(),
        "0" => PureState::zero(),
        "1" => PureState::one(),
        "+y" => PureState::plus_y(),
        "-y" => PureState::minus_y(),
        other => {
            return Err(CliError::Config(format!(
                "spins[{index}].initial_state: unknown state {other:?} (expected +, -, 0, 1, +y or -y)"
            )))
        }
    })
}

impl BathFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }

    pub fn to_bath(&self) -> Result<BathConfig, CliError> {
        let spins = self
            .spins
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let p = s.polarization.unwrap_or_else(|| {
                    log::info!("spins[{i}].polarization not given, using 1.0");
                    1.0
                });
                let state = parse_state(s.initial_state.as_deref().unwrap_or("+"), i)?;
                Ok(NuclearSpinParams::new(s.a_parallel_hz, s.a_perp_hz)
                    .with_polarization(p)
                    .with_initial_state(state))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        BathConfig::new(self.larmor_hz, spins, self.dephasing_rate_hz)
            .map_err(|e| CliError::Config(format!("schema: {e}")))
    }
}

/// Reads and validates a bath file.
pub fn load_bath(path: &Path) -> Result<BathConfig, CliError> {
    load_bath_file(path)?.to_bath()
}

pub fn load_bath_file(path: &Path) -> Result<BathFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    BathFile::parse(&text, &path.display().to_string())
}

pub fn bundled_bath_file() -> BathFile {
    BathFile::parse(BUNDLED_BATH, "bundled bath").expect("bundled bath parses")
}

pub fn bundled_bath() -> BathConfig {
    bundled_bath_file().to_bath().expect("bundled bath is valid")
}
