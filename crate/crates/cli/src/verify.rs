//! Seeded property suites behind `ssp-kit verify`.

use std::collections::BTreeSet;

use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssp_core::classify::{classify_by_rules, classify_by_table, enumerate_types, ROW_COUNTS};
use ssp_core::engine::first_unseparated;
use ssp_core::random::{for_each_small_ts, random_ts, random_type, RandomTsParams};
use ssp_core::reductions::nop_free::{gadget_facts, gen_nop_free, gen_nop_free_alpha_region, swap_free_type};
use ssp_core::reductions::nop_inp::{gen_nop_inp, gen_nop_inp_witness, nop_inp_type};
use ssp_core::reductions::{cm_oracle, example_formula, extend, unsat_formula, ExtensionKind};
use ssp_core::region::is_normalized;
use ssp_core::Interaction::*;
use ssp_core::*;

use crate::format::{parse_ts, parse_ts_json, serialize_ts, serialize_ts_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Core,
    Classify,
    Engine,
    Reductions,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Small,
    Medium,
    Large,
}

impl Scale {
    /// Random instances per randomized check.
    fn samples(self) -> usize {
        match self {
            Scale::Small => 20,
            Scale::Medium => 100,
            Scale::Large => 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &'static str, name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        suite,
        name,
        passed,
        detail,
    }
}

pub fn run_suite(suite: Suite, seed: u64, scale: Scale) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Core | Suite::All) {
        out.extend(core_suite(seed, scale));
    }
    if matches!(suite, Suite::Classify | Suite::All) {
        out.extend(classify_suite());
    }
    if matches!(suite, Suite::Engine | Suite::All) {
        out.extend(engine_suite(seed, scale));
    }
    if matches!(suite, Suite::Reductions | Suite::All) {
        out.extend(reductions_suite(seed, scale));
    }
    out
}

/// A random type with at most three interactions, keeping region counts small.
fn small_type(rng: &mut ChaCha8Rng) -> BooleanType {
    let mut all = Interaction::ALL;
    all.shuffle(rng);
    let k = rng.gen_range(1..=3);
    all[..k].iter().copied().collect()
}

fn core_suite(seed: u64, scale: Scale) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = scale.samples();
    let mut round_trips = 0;
    let mut flips = (0, 0);
    for _ in 0..n {
        let ts = random_ts(&mut rng, &RandomTsParams::default());
        let text = parse_ts(&serialize_ts(&ts)).map(|t| t == ts).unwrap_or(false);
        let json = parse_ts_json(&serialize_ts_json(&ts)).map(|t| t == ts).unwrap_or(false);
        round_trips += (text && json) as usize;
        let tau = small_type(&mut rng);
        for r in brute_force_regions(&ts, tau).expect("small system") {
            flips.0 += 1;
            flips.1 += is_region(&ts, flip_type(tau), &flip_region(&r)) as usize;
        }
    }
    vec![
        check(
            "core",
            "file round trip",
            round_trips == n,
            format!("{round_trips}/{n} systems"),
        ),
        check(
            "core",
            "flip maps regions to regions",
            flips.0 == flips.1,
            format!("{}/{} regions", flips.1, flips.0),
        ),
    ]
}

fn classify_suite() -> Vec<Check> {
    let all = enumerate_types();
    let consistent = all
        .iter()
        .filter(|(t, c)| classify_by_table(*t) == *c && classify_by_rules(*t) == *c)
        .count();
    let mut counts = [0usize; 10];
    for (_, c) in &all {
        counts[c.row as usize - 1] += 1;
    }
    let flip_ok = all
        .iter()
        .filter(|(t, c)| classify_type(flip_type(*t)).complexity == c.complexity)
        .count();
    vec![
        check(
            "classify",
            "classifiers agree",
            consistent == 256,
            format!("{consistent}/256 types consistent"),
        ),
        check("classify", "row counts", counts == ROW_COUNTS, format!("{counts:?}")),
        check(
            "classify",
            "flip keeps complexity",
            flip_ok == 256,
            format!("{flip_ok}/256 types"),
        ),
    ]
}

fn engine_suite(seed: u64, scale: Scale) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = SearchBudget::unlimited();
    let types: Vec<BooleanType> = match scale {
        Scale::Small => BooleanType::all().collect(),
        _ => {
            let all = enumerate_types();
            (1..=10u8)
                .map(|row| {
                    let members: Vec<BooleanType> = all.iter().filter(|(_, c)| c.row == row).map(|(t, _)| *t).collect();
                    *members.choose(&mut rng).expect("non-empty row")
                })
                .collect()
        }
    };
    let (states, events) = match scale {
        Scale::Small => (3, 2),
        Scale::Medium => (3, 3),
        Scale::Large => (4, 3),
    };
    let (mut checked, mut mismatches) = (0u64, 0u64);
    let mut compare = |ts: &TransitionSystem, tau: BooleanType| {
        checked += 1;
        let oracle = brute_force_decide(ts, tau).expect("small system").decision;
        mismatches += (decide_ssp(ts, tau, budget).decision != oracle) as u64;
    };
    for_each_small_ts(states, events, |small| {
        let ts = small.to_ts();
        for &tau in &types {
            compare(&ts, tau);
        }
    });
    for _ in 0..scale.samples() {
        let ts = random_ts(&mut rng, &RandomTsParams::default());
        compare(&ts, random_type(&mut rng));
    }

    let (mut monotone, mut flip, mut normal) = (0, 0, 0);
    let n = scale.samples();
    for _ in 0..n {
        let ts = random_ts(&mut rng, &RandomTsParams::default());
        let tau = random_type(&mut rng);
        let wider = tau.union(random_type(&mut rng));
        let narrow = decide_ssp(&ts, tau, budget);
        if narrow.decision == Decision::HasSsp && decide_ssp(&ts, wider, budget).decision != Decision::HasSsp {
            monotone += 1;
        }
        if decide_ssp(&ts, flip_type(tau), budget).decision != narrow.decision {
            flip += 1;
        }
        let with_nop = tau.with(Nop);
        let report = decide_ssp(&ts, with_nop, budget);
        if report.decision == Decision::HasSsp {
            let normalized: Vec<Region> = report
                .regions
                .iter()
                .map(|r| normalize_region(&ts, with_nop, r).expect("nop-equipped"))
                .collect();
            if first_unseparated(&ts, &normalized).is_some() || !normalized.iter().all(|r| is_region(&ts, with_nop, r))
            {
                normal += 1;
            }
        }
    }
    vec![
        check(
            "engine",
            "oracle equivalence",
            mismatches == 0,
            format!("{checked} instances, {mismatches} mismatches"),
        ),
        check(
            "engine",
            "monotone in the type",
            monotone == 0,
            format!("{monotone}/{n} violations"),
        ),
        check("engine", "flip invariance", flip == 0, format!("{flip}/{n} violations")),
        check(
            "engine",
            "normalization keeps separation",
            normal == 0,
            format!("{normal}/{n} violations"),
        ),
    ]
}

fn supports(ts: &TransitionSystem, tau: BooleanType, normalized: bool) -> BTreeSet<Vec<bool>> {
    brute_force_regions(ts, tau)
        .expect("small system")
        .into_iter()
        .filter(|r| !normalized || is_normalized(ts, r))
        .map(|r| r.support)
        .collect()
}

fn reductions_suite(seed: u64, scale: Scale) -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = RandomTsParams {
        max_states: 6,
        max_events: 4,
        loop_free: true,
        matching_events: true,
        ..Default::default()
    };
    let t = |members: &[Interaction]| members.iter().copied().collect::<BooleanType>();
    let (base, base_c) = (t(&[Nop, Inp, Out]), t(&[Nop, Inp]));
    let (for_b, for_c, for_d) = (t(&[Nop, Out, Res]), t(&[Nop, Res, Swap]), t(&[Nop, Res, Set]));
    let budget = SearchBudget::unlimited();
    let n = scale.samples();
    let (mut decisions, mut support_level) = (0, 0);
    for _ in 0..n {
        let a = random_ts(&mut rng, &params);
        let b = extend(&a, ExtensionKind::Backward).expect("loop-free");
        let c = extend(&a, ExtensionKind::OnewayLoop).expect("loop-free");
        let d = extend(&a, ExtensionKind::Loop).expect("loop-free");
        let da = decide_ssp(&a, base, budget).decision;
        decisions += (da == decide_ssp(&b, for_b, budget).decision
            && da == decide_ssp(&d, for_d, budget).decision
            && decide_ssp(&a, base_c, budget).decision == decide_ssp(&c, for_c, budget).decision)
            as usize;
        let sa = supports(&a, base, false);
        support_level += (sa == supports(&b, for_b, true)
            && sa == supports(&d, for_d, true)
            && supports(&a, base_c, false) == supports(&c, for_c, true)) as usize;
    }
    out.push(check(
        "reductions",
        "extension decisions",
        decisions == n,
        format!("{decisions}/{n} systems"),
    ));
    out.push(check(
        "reductions",
        "extension supports",
        support_level == n,
        format!("{support_level}/{n} systems"),
    ));

    let example = example_formula();
    let model = cm_oracle(&example).ok().flatten();
    let unsat = cm_oracle(&unsat_formula()).ok().flatten().is_none();
    out.push(check(
        "reductions",
        "one-in-three oracle",
        model == Some(BTreeSet::from([0, 4])) && unsat,
        format!("example model {model:?}, m=4 formula unsatisfiable: {unsat}"),
    ));

    let inst = gen_nop_inp(&example);
    let tau = nop_inp_type();
    let witness = gen_nop_inp_witness(&inst, &BTreeSet::from([0, 4])).map(|set| {
        let regions: Vec<Region> = set.into_iter().map(|r| r.region).collect();
        regions.iter().all(|r| is_region(&inst.ts, tau, r)) && first_unseparated(&inst.ts, &regions).is_none()
    });
    let has = decide_ssp(&inst.ts, tau, SearchBudget::default()).decision == Decision::HasSsp;
    out.push(check(
        "reductions",
        "nop-inp instance",
        witness == Ok(true) && has,
        format!(
            "{} states, {} events, witness set valid: {}, has SSP: {has}",
            inst.ts.num_states(),
            inst.ts.num_events(),
            witness == Ok(true)
        ),
    ));

    let inst = gen_nop_free(&example);
    let tau = swap_free_type();
    let alpha = gen_nop_free_alpha_region(&inst, &BTreeSet::from([0, 4]))
        .map(|r| {
            is_region(&inst.ts, tau, &r)
                && r.separates(inst.alpha.first, inst.alpha.second)
                && gadget_facts(&inst, &r).all()
                && is_region(&inst.ts, flip_type(tau), &flip_region(&r))
        })
        .unwrap_or(false);
    out.push(check(
        "reductions",
        "nop-free instance",
        alpha && inst.ts.is_bi_directed(),
        format!(
            "{} states, bi-directed: {}, alpha region and gadget facts: {alpha}",
            inst.ts.num_states(),
            inst.ts.is_bi_directed()
        ),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_suite_passes() {
        let checks = run_suite(Suite::Classify, 0, Scale::Small);
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert_eq!(checks[0].detail, "256/256 types consistent");
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        assert_eq!(
            run_suite(Suite::Core, 7, Scale::Small),
            run_suite(Suite::Core, 7, Scale::Small)
        );
    }
}
