//! Whitney pairs, the refined Stein–Tomas ratio, decoupling checks and a
//! greedy profile extractor.

mod decoupling;
mod extract;
mod stein_tomas;
mod whitney;

pub use decoupling::{decoupling_check, spectral_bump, DecouplingBattery, DecouplingRow};
pub use extract::{
    concentrate, extract_profile, profile_decompose, Concentration, DecomposeConfig, ExtractConfig, Extraction, GapRow, Ledger,
    Profile, ProfileDecomposition,
};
pub use stein_tomas::{stein_tomas_ratio, SteinTomas, TimeWindow, TAIL_TOL};
pub use whitney::{
    indicator_sum, partition_check, whitney_pairs, whitney_partners, whitney_related, WhitneyPair, WhitneyReport,
    WhitneyWindow,
};
