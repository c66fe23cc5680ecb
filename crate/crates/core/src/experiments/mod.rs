//! Figure-level studies: the time × fragment-size information surface, the GHZ
//! plateau, Chernoff and Ramsey curves, and record counts over random baths.

mod random_bath;
mod sweeps;

pub use random_bath::{
    dipolar_coupling, generate_random_bath, lattice_sites, record_count_vs_time, RandomBathSpec, RecordCurve,
    DEFAULT_REALIZATIONS, DIPOLAR_PREFACTOR_HZ_NM3, LATTICE_CONSTANT_NM, MAX_REDRAWS,
};
pub use sweeps::{
    chernoff_curve, curve_to_csv, evolved_state, ghz_plateau, holevo_surface, ramsey_curve, GhzPlateau,
    SweepMetadata, SweepResult, CURVE_CSV_HEADER, SURFACE_CSV_HEADER,
};
