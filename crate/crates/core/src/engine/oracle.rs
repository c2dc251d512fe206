//! Exhaustive region enumeration, used to cross-check the search.

use crate::interaction::{BooleanType, Interaction};
use crate::region::Region;
use crate::ts::TransitionSystem;

use super::{Atom, AtomStatus, Decision, SearchStats, SeparationReport};

/// Largest state count the oracle accepts by default.
pub const ORACLE_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("oracle limited to {cap} states, got {states}")]
    OracleCapExceeded { states: usize, cap: usize },
}

fn check_cap(ts: &TransitionSystem) -> Result<(), OracleError> {
    if ts.num_states() > ORACLE_CAP {
        Err(OracleError::OracleCapExceeded {
            states: ts.num_states(),
            cap: ORACLE_CAP,
        })
    } else {
        Ok(())
    }
}

/// `ok[x][y]`: interactions mapping `x` to `y`, as a type mask.
fn pair_table() -> [[u8; 2]; 2] {
    let mut ok = [[0u8; 2]; 2];
    for i in Interaction::ALL {
        for x in [false, true] {
            if let Some(y) = i.apply(x) {
                ok[x as usize][y as usize] |= 1 << i.index();
            }
        }
    }
    ok
}

/// Fills `masks` with the interactions of `tau` admissible for every event
/// under support bitmask `sup`; false, leaving `masks` partial, if some
/// event has none.
fn feasible_into(ts: &TransitionSystem, tau: BooleanType, sup: u32, ok: &[[u8; 2]; 2], masks: &mut Vec<u8>) -> bool {
    masks.clear();
    masks.resize(ts.num_events(), tau.bits());
    for edge in ts.edges() {
        let x = (sup >> edge.source & 1) as usize;
        let y = (sup >> edge.target & 1) as usize;
        masks[edge.event] &= ok[x][y];
        if masks[edge.event] == 0 {
            return false;
        }
    }
    true
}

fn feasible(ts: &TransitionSystem, tau: BooleanType, sup: u32) -> Option<Vec<u8>> {
    let mut masks = Vec::new();
    feasible_into(ts, tau, sup, &pair_table(), &mut masks).then_some(masks)
}

fn to_support(ts: &TransitionSystem, sup: u32) -> Vec<bool> {
    (0..ts.num_states()).map(|s| sup >> s & 1 == 1).collect()
}

fn first_member(mask: u8) -> Interaction {
    Interaction::from_index(mask.trailing_zeros() as usize).expect("non-empty mask")
}

/// Support bitmasks (bit `s` is the support of state `s`) that admit at
/// least one `tau`-region, in increasing order.
pub fn allowed_supports(ts: &TransitionSystem, tau: BooleanType) -> Result<Vec<u32>, OracleError> {
    check_cap(ts)?;
    let ok = pair_table();
    let mut masks = Vec::new();
    Ok((0..1u32 << ts.num_states())
        .filter(|&sup| feasible_into(ts, tau, sup, &ok, &mut masks))
        .collect())
}

/// Every `tau`-region of `ts`.
pub fn brute_force_regions(ts: &TransitionSystem, tau: BooleanType) -> Result<Vec<Region>, OracleError> {
    check_cap(ts)?;
    let mut out = Vec::new();
    for sup in 0..1u32 << ts.num_states() {
        let Some(masks) = feasible(ts, tau, sup) else { continue };
        let options: Vec<Vec<Interaction>> = masks
            .iter()
            .map(|&m| BooleanType::from_bits(m).members().collect())
            .collect();
        let support = to_support(ts, sup);
        let mut idx = vec![0usize; options.len()];
        loop {
            out.push(Region {
                support: support.clone(),
                signature: idx.iter().zip(&options).map(|(&k, o)| o[k]).collect(),
            });
            // Odometer step over the per-event options.
            let mut pos = 0;
            while pos < idx.len() {
                idx[pos] += 1;
                if idx[pos] < options[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
    }
    Ok(out)
}

/// Decision by exhaustive support enumeration. Scans atoms in the same
/// order as the search, so witness atoms coincide.
pub fn brute_force_decide(ts: &TransitionSystem, tau: BooleanType) -> Result<SeparationReport, OracleError> {
    let supports = allowed_supports(ts, tau)?;
    let mut report = SeparationReport {
        decision: Decision::HasSsp,
        verdicts: Vec::new(),
        regions: Vec::new(),
        stats: SearchStats::default(),
    };
    let mut used: Vec<u32> = Vec::new();
    for atom in Atom::all(ts) {
        report.stats.atoms_checked += 1;
        let differs = |sup: &u32| (sup >> atom.first ^ sup >> atom.second) & 1 == 1;
        if let Some(k) = used.iter().position(differs) {
            report.verdicts.push((atom, AtomStatus::Solved(k)));
            continue;
        }
        match supports.iter().find(|s| differs(s)) {
            Some(&sup) => {
                let masks = feasible(ts, tau, sup).expect("allowed support");
                report.verdicts.push((atom, AtomStatus::Solved(used.len())));
                report.regions.push(Region {
                    support: to_support(ts, sup),
                    signature: masks.into_iter().map(first_member).collect(),
                });
                used.push(sup);
            }
            None => {
                report.verdicts.push((atom, AtomStatus::Unsolvable));
                report.decision = Decision::LacksSsp(atom);
                break;
            }
        }
    }
    Ok(report)
}
