//! Regions: supports and signatures consistent with a Boolean type.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::interaction::{BooleanType, Interaction};
use crate::ts::TransitionSystem;

/// A support (per state) and a signature (per event), indexed like the
/// transition system they belong to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Region {
    pub support: Vec<bool>,
    pub signature: Vec<Interaction>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("assignment misses {kind} `{name}`")]
    PartialAssignment { kind: &'static str, name: String },
    #[error("assignment names unknown {kind} `{name}`")]
    UnknownKey { kind: &'static str, name: String },
    #[error("path is not connected at position {0}")]
    DisconnectedPath(usize),
    #[error("normalization requires nop in the type")]
    NopNotInType,
}

impl Region {
    /// Builds a region from name-keyed maps; both must be total.
    pub fn from_maps(
        ts: &TransitionSystem,
        sup: &BTreeMap<String, bool>,
        sig: &BTreeMap<String, Interaction>,
    ) -> Result<Region, RegionError> {
        for name in sup.keys() {
            if ts.state_id(name).is_none() {
                return Err(RegionError::UnknownKey {
                    kind: "state",
                    name: name.clone(),
                });
            }
        }
        for name in sig.keys() {
            if ts.event_id(name).is_none() {
                return Err(RegionError::UnknownKey {
                    kind: "event",
                    name: name.clone(),
                });
            }
        }
        let support = ts
            .states()
            .iter()
            .map(|s| {
                sup.get(s).copied().ok_or_else(|| RegionError::PartialAssignment {
                    kind: "state",
                    name: s.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let signature = ts
            .events()
            .iter()
            .map(|e| {
                sig.get(e).copied().ok_or_else(|| RegionError::PartialAssignment {
                    kind: "event",
                    name: e.clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Region { support, signature })
    }

    pub fn support_map(&self, ts: &TransitionSystem) -> BTreeMap<String, bool> {
        ts.states().iter().cloned().zip(self.support.iter().copied()).collect()
    }

    pub fn signature_map(&self, ts: &TransitionSystem) -> BTreeMap<String, Interaction> {
        ts.events()
            .iter()
            .cloned()
            .zip(self.signature.iter().copied())
            .collect()
    }

    /// Whether the region assigns different supports to `s` and `t`.
    pub fn separates(&self, s: usize, t: usize) -> bool {
        self.support[s] != self.support[t]
    }
}

/// True iff every signature value lies in `tau` and every edge is mapped to
/// an edge of the type.
pub fn is_region(ts: &TransitionSystem, tau: BooleanType, region: &Region) -> bool {
    region.support.len() == ts.num_states()
        && region.signature.len() == ts.num_events()
        && region.signature.iter().all(|&i| tau.contains(i))
        && ts.edges().iter().all(|e| {
            tau.has_edge(
                region.support[e.source],
                region.signature[e.event],
                region.support[e.target],
            )
        })
}

/// [`is_region`] over name-keyed maps.
pub fn check_region(
    ts: &TransitionSystem,
    tau: BooleanType,
    sup: &BTreeMap<String, bool>,
    sig: &BTreeMap<String, Interaction>,
) -> Result<bool, RegionError> {
    Region::from_maps(ts, sup, sig).map(|r| is_region(ts, tau, &r))
}

/// Reconstructs the unique region with the given initial support and
/// signature, or `None` if propagation hits an undefined application or a
/// conflicting support.
pub fn propagate_region(
    ts: &TransitionSystem,
    tau: BooleanType,
    sup_init: bool,
    sig: &[Interaction],
) -> Option<Region> {
    if sig.len() != ts.num_events() {
        return None;
    }
    let mut sup: Vec<Option<bool>> = vec![None; ts.num_states()];
    sup[ts.initial()] = Some(sup_init);
    let mut queue = VecDeque::from([ts.initial()]);
    while let Some(s) = queue.pop_front() {
        let x = sup[s]?;
        for &k in ts.out_edges(s) {
            let edge = ts.edges()[k];
            let y = tau.delta(x, sig[edge.event])?;
            match sup[edge.target] {
                None => {
                    sup[edge.target] = Some(y);
                    queue.push_back(edge.target);
                }
                Some(z) if z != y => return None,
                Some(_) => {}
            }
        }
    }
    Some(Region {
        support: sup.into_iter().map(|b| b.expect("all states reachable")).collect(),
        signature: sig.to_vec(),
    })
}

/// The image of a path under a region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathImage {
    /// Support of each visited state, one more than the number of steps.
    pub bits: Vec<bool>,
    /// Signature of each traversed event.
    pub interactions: Vec<Interaction>,
    /// Whether the step changes the support.
    pub changes: Vec<bool>,
}

impl PathImage {
    /// Renders as `1-used->1-swap->0`.
    pub fn render(&self) -> String {
        let mut out = String::from(if self.bits[0] { "1" } else { "0" });
        for (i, b) in self.interactions.iter().zip(&self.bits[1..]) {
            out.push_str(&format!("-{i}->{}", u8::from(*b)));
        }
        out
    }
}

/// Maps a path starting at `start` (edge indices) through `region`.
pub fn image_of_path(
    ts: &TransitionSystem,
    region: &Region,
    start: usize,
    path: &[usize],
) -> Result<PathImage, RegionError> {
    let mut at = start;
    let mut image = PathImage {
        bits: vec![region.support[start]],
        interactions: Vec::with_capacity(path.len()),
        changes: Vec::with_capacity(path.len()),
    };
    for (pos, &k) in path.iter().enumerate() {
        let edge = ts.edges()[k];
        if edge.source != at {
            return Err(RegionError::DisconnectedPath(pos));
        }
        let (x, y) = (region.support[edge.source], region.support[edge.target]);
        image.bits.push(y);
        image.interactions.push(region.signature[edge.event]);
        image.changes.push(x != y);
        at = edge.target;
    }
    Ok(image)
}

/// Replaces `sig(e)` by nop for every event whose edges all keep their
/// support. Support is unchanged.
pub fn normalize_region(ts: &TransitionSystem, tau: BooleanType, region: &Region) -> Result<Region, RegionError> {
    if !tau.contains(Interaction::Nop) {
        return Err(RegionError::NopNotInType);
    }
    let mut out = region.clone();
    for e in 0..ts.num_events() {
        let keeps = ts
            .event_edges(e)
            .iter()
            .all(|&k| region.support[ts.edges()[k].source] == region.support[ts.edges()[k].target]);
        if keeps {
            out.signature[e] = Interaction::Nop;
        }
    }
    Ok(out)
}

/// Whether `region` is already normalized.
pub fn is_normalized(ts: &TransitionSystem, region: &Region) -> bool {
    (0..ts.num_events()).all(|e| {
        let keeps = ts
            .event_edges(e)
            .iter()
            .all(|&k| region.support[ts.edges()[k].source] == region.support[ts.edges()[k].target]);
        keeps == (region.signature[e] == Interaction::Nop)
    })
}

#[cfg(test)]
mod tests {
    use super::Interaction::*;
    use super::*;
    use crate::ts::validate_ts;

    fn a2() -> TransitionSystem {
        validate_ts("r0", &[("r0", "b", "r1"), ("r0", "c", "r1")]).unwrap()
    }

    fn a3() -> TransitionSystem {
        validate_ts("s0", &[("s0", "a", "s1"), ("s1", "b", "s2"), ("s2", "c", "s3")]).unwrap()
    }

    fn tilde() -> BooleanType {
        BooleanType::from([Nop, Set, Swap, Used])
    }

    #[test]
    fn a2_region_under_nop_inp() {
        let ts = a2();
        let tau = BooleanType::from([Nop, Inp]);
        let r = Region {
            support: vec![true, false],
            signature: vec![Inp, Inp],
        };
        assert!(is_region(&ts, tau, &r));
        let bad = Region {
            support: vec![true, false],
            signature: vec![Nop, Inp],
        };
        assert!(!is_region(&ts, tau, &bad));
    }

    #[test]
    fn a3_propagation_and_image() {
        let ts = a3();
        let r = propagate_region(&ts, tilde(), true, &[Used, Swap, Set]).unwrap();
        assert_eq!(r.support, vec![true, true, false, true]);
        assert!(is_region(&ts, tilde(), &r));
        let path = ts.walk(0, &["a", "b", "c"]).unwrap();
        let img = image_of_path(&ts, &r, 0, &path).unwrap();
        assert_eq!(img.render(), "1-used->1-swap->0-set->1");
        assert_eq!(img.changes, vec![false, true, true]);
        let empty = image_of_path(&ts, &r, 0, &[]).unwrap();
        assert_eq!(empty.bits, vec![true]);
        assert_eq!(
            image_of_path(&ts, &r, 0, &[path[1]]),
            Err(RegionError::DisconnectedPath(0))
        );
    }

    #[test]
    fn a3_normalization_replaces_used() {
        let ts = a3();
        let r = propagate_region(&ts, tilde(), true, &[Used, Swap, Set]).unwrap();
        let n = normalize_region(&ts, tilde(), &r).unwrap();
        assert_eq!(n.signature, vec![Nop, Swap, Set]);
        assert_eq!(n.support, r.support);
        assert!(is_normalized(&ts, &n));
        assert_eq!(normalize_region(&ts, tilde(), &n).unwrap(), n);
        let no_nop = BooleanType::from([Swap]);
        assert_eq!(normalize_region(&ts, no_nop, &r), Err(RegionError::NopNotInType));
    }

    #[test]
    fn back_edge_conflict() {
        let a1 = validate_ts("s0", &[("s0", "a", "s1"), ("s1", "a", "s0")]).unwrap();
        assert_eq!(propagate_region(&a1, BooleanType::from([Nop, Inp]), true, &[Inp]), None);
    }

    #[test]
    fn all_nop_is_constant() {
        let ts = a3();
        let r = propagate_region(&ts, BooleanType::from([Nop]), false, &[Nop; 3]).unwrap();
        assert!(r.support.iter().all(|b| !b));
    }

    #[test]
    fn maps_must_be_total() {
        let ts = a2();
        let sup = BTreeMap::from([("r0".to_string(), true)]);
        let sig = BTreeMap::from([("b".to_string(), Inp), ("c".to_string(), Inp)]);
        let err = check_region(&ts, BooleanType::from([Nop, Inp]), &sup, &sig).unwrap_err();
        assert!(matches!(err, RegionError::PartialAssignment { kind: "state", .. }));
        let sup = BTreeMap::from([("r0".to_string(), true), ("r1".to_string(), false)]);
        assert_eq!(check_region(&ts, BooleanType::from([Nop, Inp]), &sup, &sig), Ok(true));
    }
}
