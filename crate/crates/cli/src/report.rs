//! JSON reports and region set files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use ssp_core::engine::SearchStats;
use ssp_core::reductions::NamedRegion;
use ssp_core::{Decision, Interaction, Region, SeparationReport, TransitionSystem};

/// A region keyed by state and event names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionJson {
    pub sup: BTreeMap<String, u8>,
    pub sig: BTreeMap<String, String>,
}

impl RegionJson {
    pub fn new(ts: &TransitionSystem, region: &Region) -> Self {
        RegionJson {
            sup: region.support_map(ts).into_iter().map(|(k, v)| (k, v as u8)).collect(),
            sig: region
                .signature_map(ts)
                .into_iter()
                .map(|(k, v)| (k, v.name().to_string()))
                .collect(),
        }
    }

    /// Back to an indexed region; `None` if names or values do not fit `ts`.
    pub fn to_region(&self, ts: &TransitionSystem) -> Option<Region> {
        let sup: BTreeMap<String, bool> = self
            .sup
            .iter()
            .map(|(k, &v)| (v <= 1).then(|| (k.clone(), v == 1)))
            .collect::<Option<_>>()?;
        let sig: BTreeMap<String, Interaction> = self
            .sig
            .iter()
            .map(|(k, v)| v.parse().ok().map(|i| (k.clone(), i)))
            .collect::<Option<_>>()?;
        Region::from_maps(ts, &sup, &sig).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsJson {
    pub atoms_checked: u64,
    pub nodes_expanded: u64,
    pub wall_ms: u64,
}

impl From<SearchStats> for StatsJson {
    fn from(s: SearchStats) -> Self {
        StatsJson {
            atoms_checked: s.atoms_checked,
            nodes_expanded: s.nodes_expanded,
            wall_ms: s.wall_ms,
        }
    }
}

/// Output of `check-ssp`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub decision: String,
    pub witness_atom: Option<[String; 2]>,
    pub regions: Vec<RegionJson>,
    pub stats: StatsJson,
}

impl ReportJson {
    pub fn new(ts: &TransitionSystem, report: &SeparationReport) -> Self {
        let witness_atom = match report.decision {
            Decision::LacksSsp(atom) => {
                let (a, b) = atom.names(ts);
                Some([a.to_string(), b.to_string()])
            }
            _ => None,
        };
        ReportJson {
            decision: report.decision.label().to_string(),
            witness_atom,
            regions: report.regions.iter().map(|r| RegionJson::new(ts, r)).collect(),
            stats: report.stats.into(),
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("decision: {}\n", self.decision);
        if let Some([a, b]) = &self.witness_atom {
            let _ = writeln!(out, "witness atom: ({a}, {b})");
        }
        for (k, r) in self.regions.iter().enumerate() {
            let _ = writeln!(out, "region {k}: {}", render_region(r));
        }
        let s = self.stats;
        let _ = writeln!(
            out,
            "atoms checked: {}, nodes expanded: {}, wall: {} ms",
            s.atoms_checked, s.nodes_expanded, s.wall_ms
        );
        out
    }
}

/// `sup {s0=1 s1=0} sig {a=inp}`.
pub fn render_region(r: &RegionJson) -> String {
    let sup: Vec<String> = r.sup.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let sig: Vec<String> = r.sig.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("sup {{{}}} sig {{{}}}", sup.join(" "), sig.join(" "))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedRegionJson {
    pub name: String,
    #[serde(flatten)]
    pub region: RegionJson,
}

/// A region set file: the type the regions are meant for and the regions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSetJson {
    #[serde(rename = "type")]
    pub tau: String,
    pub regions: Vec<NamedRegionJson>,
}

impl RegionSetJson {
    pub fn new(ts: &TransitionSystem, tau: &str, regions: &[NamedRegion]) -> Self {
        RegionSetJson {
            tau: tau.to_string(),
            regions: regions
                .iter()
                .map(|r| NamedRegionJson {
                    name: r.name.clone(),
                    region: RegionJson::new(ts, &r.region),
                })
                .collect(),
        }
    }
}
