//! Hardness gadgets built from cubic monotone one-in-three 3SAT formulas,
//! their witness regions, and the backward and loop extensions.

pub mod cm;
pub mod extend;
pub mod nop_free;
pub mod nop_inp;

use std::collections::BTreeSet;

use crate::interaction::{BooleanType, Interaction};
use crate::region::{is_region, propagate_region, Region};
use crate::ts::TransitionSystem;

pub use cm::{cm_oracle, example_formula, unsat_formula, CmError, CmFormula};
pub use extend::{extend, ExtensionError, ExtensionKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("model does not meet clause {clause} in exactly one variable")]
    ModelNotOneInThree { clause: usize },
    #[error("witness `{0}` is not a region")]
    InvalidWitness(String),
}

/// A region with the name of the family it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedRegion {
    pub name: String,
    pub region: Region,
}

pub(crate) fn check_model(formula: &CmFormula, model: &BTreeSet<usize>) -> Result<(), ReductionError> {
    match formula
        .clauses()
        .iter()
        .position(|c| c.iter().filter(|v| model.contains(v)).count() != 1)
    {
        Some(clause) => Err(ReductionError::ModelNotOneInThree { clause }),
        None => Ok(()),
    }
}

/// The region with initial support `sup_init` whose signature is `special`
/// on the events in `marked` and `other` elsewhere.
pub(crate) fn region_from_events(
    ts: &TransitionSystem,
    tau: BooleanType,
    name: String,
    sup_init: bool,
    marked: &[&str],
    special: Interaction,
    other: Interaction,
) -> Result<NamedRegion, ReductionError> {
    let mut sig = vec![other; ts.num_events()];
    for e in marked {
        let id = ts.event_id(e).unwrap_or_else(|| panic!("generator names event `{e}`"));
        sig[id] = special;
    }
    match propagate_region(ts, tau, sup_init, &sig) {
        Some(region) if is_region(ts, tau, &region) => Ok(NamedRegion { name, region }),
        _ => Err(ReductionError::InvalidWitness(name)),
    }
}
