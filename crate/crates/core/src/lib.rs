//! Boolean state separation for labeled transition systems.
//!
//! The crate covers the data model (transition systems, Boolean types,
//! regions), the complexity classification of all 256 Boolean types, a
//! region search engine with a brute-force oracle, and generators for the
//! hardness gadgets together with their witness regions.

pub mod classify;
pub mod engine;
pub mod interaction;
pub mod random;
pub mod reductions;
pub mod region;
pub mod ts;

pub use classify::{classify_type, flip_region, flip_type, Classification, Complexity};
pub use engine::{
    brute_force_decide, brute_force_regions, decide_ssp, embedding_certificate, fast_path_swap_core, solve_atom, Atom,
    AtomVerdict, Decision, SearchBudget, SeparationReport,
};
pub use interaction::{BooleanType, Interaction};
pub use region::{image_of_path, is_region, normalize_region, propagate_region, PathImage, Region};
pub use ts::{Edge, TransitionSystem, TsBuilder, TsError};
