//! Command-line front end: bath loading, command dispatch and CSV/JSON output.

mod config;

use std::f64::consts::E;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub use config::{bundled_bath, bundled_bath_file, load_bath, load_bath_file, BathFile, SpinEntry, BUNDLED_BATH};

use crate::axy::{designs_to_csv, resonance_spacing, solve_timings};
use crate::error::Error;
use crate::experiments::{
    chernoff_curve, curve_to_csv, ghz_plateau, holevo_surface, ramsey_curve,
    record_count_vs_time, RandomBathSpec,
};
use crate::metrics::{redundancy_from_curve, InfoPath};
use crate::model::{loschmidt_echo_signal, BathConfig};
use crate::numfmt::format_sig;

/// Environment variable naming the directory for relative output paths.
pub const OUTPUT_DIR_ENV: &str = "QDARWIN_OUTPUT_DIR";

pub const GHZ_CSV_HEADER: &str = "fragment_size,chi_corrected_bits,chi_uncorrected_bits";
pub const SPECTRUM_CSV_HEADER: &str = "frequency_hz,magnitude";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{operation}: {source}")]
    Domain {
        operation: &'static str,
        #[source]
        source: Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}

fn domain(operation: &'static str) -> impl FnOnce(Error) -> CliError {
    move |source| CliError::Domain { operation, source }
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "qdarwin", version, about = "Redundant pointer records in a central-spin nuclear bath")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Bath file (TOML); the bundled four-spin register when omitted.
    #[arg(long, global = true)]
    pub bath: Option<PathBuf>,

    /// Output CSV path; relative paths resolve against $QDARWIN_OUTPUT_DIR when set.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Seed recorded in the metadata and used by random-bath.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TimeGrid {
    /// Last time of the grid, µs.
    #[arg(long, default_value_t = 30.0)]
    pub t_max_us: f64,
    /// Grid spacing, µs.
    #[arg(long, default_value_t = 0.5)]
    pub t_step_us: f64,
}

impl TimeGrid {
    /// Seconds.
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        if !(self.t_step_us > 0.0) || !(self.t_max_us >= 0.0) || !self.t_max_us.is_finite() {
            return Err(CliError::Config(format!(
                "time grid needs t_step_us > 0 and t_max_us >= 0, got {} and {}",
                self.t_step_us, self.t_max_us
            )));
        }
        let n = (self.t_max_us / self.t_step_us + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| i as f64 * self.t_step_us * 1e-6).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathChoice {
    Auto,
    ClosedForm,
    Explicit,
}

impl From<PathChoice> for InfoPath {
    fn from(p: PathChoice) -> Self {
        match p {
            PathChoice::Auto => InfoPath::Auto,
            PathChoice::ClosedForm => InfoPath::ClosedForm,
            PathChoice::Explicit => InfoPath::Explicit,
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Fragment-averaged χ, I and D over time and fragment size.
    Surface {
        #[command(flatten)]
        grid: TimeGrid,
        /// Largest fragment size; the whole bath when omitted.
        #[arg(long)]
        max_fragment: Option<usize>,
        /// Information deficit for the redundancy summary.
        #[arg(long, default_value_t = 1.0 / E)]
        delta: f64,
        /// Keep the measured polarizations instead of normalizing them to 1.
        #[arg(long)]
        uncorrected: bool,
        #[arg(long, value_enum, default_value_t = PathChoice::Auto)]
        path: PathChoice,
    },
    /// χ versus fragment size for the GHZ protocol.
    Ghz {
        #[arg(long, default_value_t = 3)]
        n_spins: usize,
    },
    /// Mean quantum Chernoff information of the conditional pairs versus time.
    Chernoff {
        #[command(flatten)]
        grid: TimeGrid,
        #[arg(long)]
        uncorrected: bool,
    },
    /// Ramsey return probability versus time.
    Ramsey {
        #[command(flatten)]
        grid: TimeGrid,
    },
    /// Loschmidt echo on the strongest spins and its spectrum.
    Echo {
        #[arg(long, default_value_t = 3)]
        n_spins: usize,
        /// Sweep spacing, µs.
        #[arg(long, default_value_t = 0.1)]
        tau_step_us: f64,
        #[arg(long, default_value_t = 1024)]
        points: usize,
    },
    /// AXY timing table for one or more target coefficients.
    AxyDesign {
        #[arg(long = "f-dd", required = true, num_args = 1.., allow_negative_numbers = true)]
        f_dd: Vec<f64>,
        /// Interpulse spacing, µs; resonant with --spin when omitted.
        #[arg(long)]
        tau_us: Option<f64>,
        /// Bath spin whose ν_L + A∥/2 sets the spacing.
        #[arg(long, default_value_t = 0)]
        spin: usize,
    },
    /// Record count versus time averaged over random ¹³C baths.
    RandomBath {
        #[arg(long, default_value_t = 0.011)]
        concentration: f64,
        #[arg(long, default_value_t = 2.0)]
        radius_nm: f64,
        #[arg(long, default_value_t = 10)]
        realizations: usize,
        #[arg(long, default_value_t = 1.0)]
        polarization: f64,
        #[arg(long, default_value_t = 1.0 / E)]
        delta: f64,
        #[arg(long, default_value_t = 2.0)]
        t_max_us: f64,
        #[arg(long, default_value_t = 0.02)]
        t_step_us: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Surface { .. } => "surface",
            Command::Ghz { .. } => "ghz",
            Command::Chernoff { .. } => "chernoff",
            Command::Ramsey { .. } => "ramsey",
            Command::Echo { .. } => "echo",
            Command::AxyDesign { .. } => "axy-design",
            Command::RandomBath { .. } => "random-bath",
        }
    }
}

/// Files written by a successful run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub written: Vec<PathBuf>,
}

fn resolve_output(cfg: &RunConfig) -> PathBuf {
    let path = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.command.name())));
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path,
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn meta_path(path: &Path) -> PathBuf {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{name}.meta.json"))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn bath_echo(bath: &BathConfig) -> BathFile {
    BathFile {
        larmor_hz: bath.larmor_hz,
        dephasing_rate_hz: bath.electron_dephasing_rate,
        spins: bath
            .spins
            .iter()
            .map(|s| SpinEntry {
                a_parallel_hz: s.a_parallel_hz,
                a_perp_hz: s.a_perp_hz,
                polarization: Some(s.polarization),
                initial_state: None,
            })
            .collect(),
    }
}

fn load(cfg: &RunConfig) -> Result<(BathConfig, Value), CliError> {
    let file = match &cfg.bath {
        Some(p) => load_bath_file(p)?,
        None => bundled_bath_file(),
    };
    let bath = file.to_bath()?;
    let echo = serde_json::to_value(&file).expect("bath file serializes");
    Ok((bath, echo))
}

/// Runs one command and writes its CSV plus a `<output>.meta.json` sidecar.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let out = resolve_output(cfg);
    let (bath, config_echo) = load(cfg)?;
    let mut written = Vec::new();
    let mut extra = json!({});

    let csv = match &cfg.command {
        Command::Surface { grid, max_fragment, delta, uncorrected, path } => {
            let times = grid.times()?;
            let max_m = max_fragment.unwrap_or(bath.len());
            if !(*delta > 0.0 && *delta < 1.0) {
                return Err(CliError::Config(format!("delta {delta} not in (0, 1)")));
            }
            let sweep = holevo_surface(&bath, &times, max_m, !uncorrected, (*path).into())
                .map_err(domain("holevo_surface"))?;
            let mut rows = Vec::new();
            if max_m == bath.len() {
                for (t, chi) in times.iter().zip(&sweep.chi_surface) {
                    // branch weights are ½ throughout, so H(Π̂_S) = 1 bit
                    let r = redundancy_from_curve(chi.clone(), 1.0, *delta).map_err(domain("redundancy"))?;
                    rows.push(json!({
                        "time_us": format_sig(t * 1e6),
                        "f_delta": r.f_delta,
                        "redundancy": r.redundancy.map(format_sig),
                    }));
                }
            }
            extra = json!({ "delta": format_sig(*delta), "redundancy": rows });
            sweep.to_csv()
        }
        Command::Ghz { n_spins } => {
            let g = ghz_plateau(&bath, *n_spins, None).map_err(domain("ghz_plateau"))?;
            extra = json!({
                "spins": g.spins,
                "whole_register_chi_uncorrected_bits": format_sig(g.whole_register_uncorrected),
            });
            let mut s = format!("{GHZ_CSV_HEADER}\n");
            for ((m, a), b) in g.fragment_sizes.iter().zip(&g.chi_corrected).zip(&g.chi_uncorrected) {
                let _ = writeln!(s, "{m},{},{}", format_sig(*a), format_sig(*b));
            }
            s
        }
        Command::Chernoff { grid, uncorrected } => {
            let times = grid.times()?;
            let used = if *uncorrected { bath.clone() } else { bath.fully_polarized() };
            let xi = chernoff_curve(&used, &times).map_err(domain("chernoff_curve"))?;
            curve_to_csv(&times, &xi)
        }
        Command::Ramsey { grid } => {
            let times = grid.times()?;
            let sig = ramsey_curve(&bath, &times).map_err(domain("ramsey_signal"))?;
            let pop: Vec<f64> = sig.iter().map(|s| s.population).collect();
            curve_to_csv(&times, &pop)
        }
        Command::Echo { n_spins, tau_step_us, points } => {
            let taus: Vec<f64> = (0..*points).map(|i| i as f64 * tau_step_us * 1e-6).collect();
            let echo = loschmidt_echo_signal(&bath, *n_spins, &taus).map_err(domain("loschmidt_echo_signal"))?;
            let mut spec = format!("{SPECTRUM_CSV_HEADER}\n");
            for (f, m) in echo.frequencies_hz.iter().zip(&echo.spectrum) {
                let _ = writeln!(spec, "{},{}", format_sig(*f), format_sig(*m));
            }
            let spec_path = sibling(&out, ".spectrum.csv");
            write_file(&spec_path, &spec)?;
            written.push(spec_path);
            extra = json!({ "spins": echo.spins, "bin_width_hz": format_sig(echo.bin_width_hz()) });
            curve_to_csv(&echo.taus, &echo.signal)
        }
        Command::AxyDesign { f_dd, tau_us, spin } => {
            let tau = match tau_us {
                Some(t) => t * 1e-6,
                None => {
                    let s = bath.spins.get(*spin).ok_or_else(|| {
                        CliError::Config(format!("--spin {spin} not in a bath of {}", bath.len()))
                    })?;
                    resonance_spacing(bath.larmor_hz, s.a_parallel_hz).map_err(domain("resonance_spacing"))?
                }
            };
            let designs = f_dd
                .iter()
                .map(|&f| solve_timings(f, tau))
                .collect::<Result<Vec<_>, _>>()
                .map_err(domain("solve_timings"))?;
            designs_to_csv(&designs)
        }
        Command::RandomBath { concentration, radius_nm, realizations, polarization, delta, t_max_us, t_step_us } => {
            let times = TimeGrid { t_max_us: *t_max_us, t_step_us: *t_step_us }.times()?;
            let mut spec = RandomBathSpec::new(*concentration, *radius_nm, cfg.seed);
            spec.n_realizations = *realizations;
            spec.initial_polarization = *polarization;
            spec.larmor_hz = bath.larmor_hz;
            let curve = record_count_vs_time(&spec, &times, *delta).map_err(domain("record_count_vs_time"))?;
            extra = json!({ "bath_sizes": curve.bath_sizes });
            curve_to_csv(&times, &curve.mean)
        }
    };

    write_file(&out, &csv)?;
    written.insert(0, out.clone());
    let meta = json!({
        "tool": "qdarwin",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "seed": cfg.seed,
        "flags": serde_json::to_value(&cfg.command).expect("command serializes"),
        "bath_source": cfg.bath.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "bundled".into()),
        "config": config_echo,
        "bath": serde_json::to_value(bath_echo(&bath)).expect("bath serializes"),
        "results": extra,
    });
    let meta_file = meta_path(&out);
    write_file(&meta_file, &(serde_json::to_string_pretty(&meta).expect("json") + "\n"))?;
    written.push(meta_file);
    Ok(RunOutput { written })
}
