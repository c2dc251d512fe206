//! Shortcut for the types `{swap} ∪ ω` with `ω ⊆ {inp, out}`: every
//! interaction of such a type flips the support, so a system with the SSP
//! has at most two states.

use crate::interaction::{BooleanType, Interaction::*};
use crate::ts::TransitionSystem;

use super::{decide_ssp, Atom, Decision, SearchBudget, SeparationReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("type {0} is not swap plus a subset of {{inp,out}}")]
pub struct FastPathError(pub String);

fn check_family(tau: BooleanType) -> Result<(), FastPathError> {
    let core = BooleanType::from([Swap]);
    if core.is_subset(tau) && tau.is_subset(BooleanType::from([Swap, Inp, Out])) {
        Ok(())
    } else {
        Err(FastPathError(tau.to_string()))
    }
}

/// Returns `Some(LacksSsp(..))` when the state count rules out the SSP and
/// `None` when the full decision is needed.
pub fn fast_path_swap_core(ts: &TransitionSystem, tau: BooleanType) -> Result<Option<Decision>, FastPathError> {
    check_family(tau)?;
    let n = ts.num_states();
    if n <= 1 {
        return Ok(None);
    }
    if !ts.is_loop_free() {
        // No interaction of the type fixes a bit, so there is no region at all.
        return Ok(Some(Decision::LacksSsp(Atom::new(0, 1))));
    }
    if n <= 2 {
        return Ok(None);
    }
    // Supports alternate along every edge. Two successors of the initial
    // state share a support; otherwise some state two steps away shares
    // the initial support.
    let iota = ts.initial();
    let succ: Vec<usize> = ts.out_edges(iota).iter().map(|&k| ts.edges()[k].target).collect();
    let atom = match succ.iter().find(|&&t| t != succ[0]) {
        Some(&other) => Atom::new(succ[0].min(other), succ[0].max(other)),
        None => {
            let s = succ[0];
            let far = ts
                .out_edges(s)
                .iter()
                .map(|&k| ts.edges()[k].target)
                .find(|&t| t != iota && t != s)
                .expect("a third state is reachable through the only successor");
            Atom::new(iota.min(far), iota.max(far))
        }
    };
    Ok(Some(Decision::LacksSsp(atom)))
}

/// Full decision using the shortcut where it applies.
pub fn decide_swap_core(
    ts: &TransitionSystem,
    tau: BooleanType,
    budget: SearchBudget,
) -> Result<SeparationReport, FastPathError> {
    match fast_path_swap_core(ts, tau)? {
        Some(decision) => Ok(SeparationReport {
            decision,
            verdicts: Vec::new(),
            regions: Vec::new(),
            stats: Default::default(),
        }),
        None => Ok(decide_ssp(ts, tau, budget)),
    }
}
