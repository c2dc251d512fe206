//! Backward, oneway-loop and loop extensions of loop-free systems.
//!
//! For every edge `s -e-> s'` of the input:
//! * backward adds `s' -bar_e-> s`;
//! * oneway loop additionally adds `s' -e-> s'`;
//! * loop additionally adds `s -bar_e-> s`.

use std::collections::BTreeSet;

use crate::ts::{TransitionSystem, TsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtensionKind {
    Backward,
    OnewayLoop,
    Loop,
}

impl std::str::FromStr for ExtensionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "backward" => Ok(ExtensionKind::Backward),
            "oneway-loop" | "oneway_loop" | "onewayloop" => Ok(ExtensionKind::OnewayLoop),
            "loop" => Ok(ExtensionKind::Loop),
            other => Err(format!("unknown extension kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionError {
    #[error("extensions require a loop-free transition system")]
    NotLoopFree,
    /// Two added edges share a source and event, e.g. when two `e`-edges
    /// enter the same state.
    #[error("extension is not deterministic: {0}")]
    Nondeterministic(TsError),
}

/// Name of the reverse event of each event, `bar_<name>` unless taken.
pub fn barred_names(ts: &TransitionSystem) -> Vec<String> {
    let mut taken: BTreeSet<String> = ts.events().iter().cloned().collect();
    ts.events()
        .iter()
        .map(|e| {
            let mut name = format!("bar_{e}");
            while taken.contains(&name) {
                name = format!("bar_{name}");
            }
            taken.insert(name.clone());
            name
        })
        .collect()
}

pub fn extend(ts: &TransitionSystem, kind: ExtensionKind) -> Result<TransitionSystem, ExtensionError> {
    if !ts.is_loop_free() {
        return Err(ExtensionError::NotLoopFree);
    }
    let bars = barred_names(ts);
    let mut b = ts.to_builder();
    for edge in ts.edges() {
        let (s, t) = (ts.state_name(edge.source), ts.state_name(edge.target));
        let bar = &bars[edge.event];
        b.edge(t, bar.as_str(), s);
        if kind != ExtensionKind::Backward {
            b.edge(t, ts.event_name(edge.event), t);
        }
        if kind == ExtensionKind::Loop {
            b.edge(s, bar.as_str(), s);
        }
    }
    b.build().map_err(ExtensionError::Nondeterministic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ts::validate_ts;

    fn names(ts: &TransitionSystem) -> Vec<(String, String, String)> {
        ts.edge_names()
            .map(|(s, e, t)| (s.into(), e.into(), t.into()))
            .collect()
    }

    fn triple(s: &str, e: &str, t: &str) -> (String, String, String) {
        (s.into(), e.into(), t.into())
    }

    #[test]
    fn single_edge() {
        let a = validate_ts("q0", &[("q0", "a", "q1")]).unwrap();
        let b = extend(&a, ExtensionKind::Backward).unwrap();
        assert_eq!(names(&b), vec![triple("q0", "a", "q1"), triple("q1", "bar_a", "q0")]);
        let c = extend(&a, ExtensionKind::OnewayLoop).unwrap();
        assert_eq!(c.num_edges(), 3);
        assert!(names(&c).contains(&triple("q1", "a", "q1")));
        let d = extend(&a, ExtensionKind::Loop).unwrap();
        assert_eq!(
            names(&d),
            vec![
                triple("q0", "a", "q1"),
                triple("q0", "bar_a", "q0"),
                triple("q1", "a", "q1"),
                triple("q1", "bar_a", "q0"),
            ]
        );
    }

    #[test]
    fn errors() {
        let looped = validate_ts("q", &[("q", "a", "q")]).unwrap();
        assert_eq!(
            extend(&looped, ExtensionKind::Backward),
            Err(ExtensionError::NotLoopFree)
        );
        let merge = validate_ts("q0", &[("q0", "a", "q2"), ("q0", "b", "q1"), ("q1", "a", "q2")]).unwrap();
        assert!(matches!(
            extend(&merge, ExtensionKind::Backward),
            Err(ExtensionError::Nondeterministic(_))
        ));
    }

    #[test]
    fn empty_and_clashing_names() {
        let single = validate_ts::<&str>("s", &[]).unwrap();
        assert_eq!(extend(&single, ExtensionKind::Loop).unwrap(), single);
        let clash = validate_ts("s", &[("s", "a", "t"), ("t", "bar_a", "u")]).unwrap();
        assert_eq!(barred_names(&clash), vec!["bar_bar_a", "bar_bar_bar_a"]);
        assert!(extend(&clash, ExtensionKind::Backward).is_ok());
    }
}
