//! Information carried by environment fragments about the pointer observable:
//! mutual information, Holevo quantity, discord, redundancy and the Chernoff
//! record-count estimate. Entropies are in bits, Chernoff exponents in nats.

mod chernoff;
mod info;
mod redundancy;

pub use chernoff::{
    chernoff_information, chernoff_per_spin, chernoff_pure, chernoff_summary, chernoff_trace, record_count,
    ChernoffResult, RecordCount, GOLDEN_TOL, ZERO_OVERLAP,
};
pub use info::{
    closed_form_info, discord, discord_from_joint, explicit_info, fragment_average, fragment_average_chi,
    fragment_info, fragments_of_size, holevo, holevo_from_joint, info_from_joint, mutual_information,
    pointer_entropy, Fragment, FragmentAverage, InfoBreakdown, InfoPath, EXACT_ENUMERATION_LIMIT,
    FRAGMENT_SEED, SAMPLED_FRAGMENTS,
};
pub use redundancy::{redundancy, redundancy_from_curve, RedundancyResult};
