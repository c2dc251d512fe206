//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero on any failure that is not a recorded deviation.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ssp_core::classify::{classify_by_rules, classify_by_table, enumerate_types, ROW_COUNTS};
use ssp_core::engine::{allowed_supports, decide_swap_core, first_unseparated};
use ssp_core::random::{for_each_small_ts, random_ts, random_type, RandomTsParams};
use ssp_core::reductions::nop_free::{gadget_facts, gen_nop_free, gen_nop_free_alpha_region, swap_free_type};
use ssp_core::reductions::nop_inp::{gen_nop_inp, gen_nop_inp_witness, nop_inp_type};
use ssp_core::reductions::{cm_oracle, example_formula, extend, unsat_formula, ExtensionKind};
use ssp_core::region::is_normalized;
use ssp_core::ts::validate_ts;
use ssp_core::Interaction::*;
use ssp_core::*;

/// Result of one criterion.
struct Verdict {
    pass: bool,
    /// The failure matches a deviation recorded in the decisions ledger.
    known: bool,
    detail: String,
}

impl Verdict {
    fn check(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            known: false,
            detail: detail.into(),
        }
    }
}

fn run(id: u32, name: &str, limit: Duration, body: impl FnOnce() -> Verdict) -> bool {
    let started = Instant::now();
    let mut v = body();
    let spent = started.elapsed();
    if spent > limit {
        v.pass = false;
        v.known = false;
        v.detail = format!("{}; over time limit", v.detail);
    }
    let status = if v.pass { "PASS" } else { "FAIL" };
    let note = if !v.pass && v.known {
        " [recorded deviation]"
    } else {
        ""
    };
    println!(
        "criterion {id} {name}: {status} ({}; {:.2}s, limit {}s){note}",
        v.detail,
        spent.as_secs_f64(),
        limit.as_secs()
    );
    v.pass || v.known
}

fn interaction_table() -> Verdict {
    // Rows x = 0 and x = 1 of the interaction table; None is undefined.
    let expected: [(Interaction, Option<bool>, Option<bool>); 8] = [
        (Nop, Some(false), Some(true)),
        (Inp, None, Some(false)),
        (Out, Some(true), None),
        (Res, Some(false), Some(false)),
        (Set, Some(true), Some(true)),
        (Swap, Some(true), Some(false)),
        (Used, None, Some(true)),
        (Free, Some(false), None),
    ];
    let mut matched = 0;
    for (i, zero, one) in expected {
        matched += (i.apply(false) == zero) as usize + (i.apply(true) == one) as usize;
    }
    Verdict::check(matched == 16, format!("{matched}/16 cells"))
}

fn classification() -> Verdict {
    let all = enumerate_types();
    let mut counts = [0usize; 10];
    for (_, c) in &all {
        counts[c.row as usize - 1] += 1;
    }
    let agree = all
        .iter()
        .filter(|(t, _)| classify_by_table(*t) == classify_by_rules(*t))
        .count();
    let row_breaks: Vec<BooleanType> = all
        .iter()
        .filter(|(t, c)| classify_type(flip_type(*t)).row != c.row)
        .map(|(t, _)| *t)
        .collect();
    let complexity_breaks = all
        .iter()
        .filter(|(t, c)| classify_type(flip_type(*t)).complexity != c.complexity)
        .count();
    let rest = all.len() == 256 && counts == ROW_COUNTS && agree == 256;
    let detail = format!(
        "{} types, rows {counts:?}, classifiers agree on {agree}, flip changes row of {} and complexity of {complexity_breaks}",
        all.len(),
        row_breaks.len()
    );
    let mut v = Verdict::check(rest && row_breaks.is_empty(), detail);
    // Fig. 1 itself places {nop,inp,out,used} in row 5 and its flip in row 6.
    let pair = [
        BooleanType::from([Nop, Inp, Out, Used]),
        BooleanType::from([Nop, Inp, Out, Free]),
    ];
    v.known = rest && complexity_breaks == 0 && row_breaks.len() == 2 && row_breaks.iter().all(|t| pair.contains(t));
    v
}

fn fixtures() -> Verdict {
    let a1 = validate_ts("s0", &[("s0", "a", "s1"), ("s1", "a", "s0")]).unwrap();
    let a2 = validate_ts("r0", &[("r0", "b", "r1"), ("r0", "c", "r1")]).unwrap();
    let a3 = validate_ts("s0", &[("s0", "a", "s1"), ("s1", "b", "s2"), ("s2", "c", "s3")]).unwrap();
    let tau = BooleanType::from([Nop, Inp]);
    let tilde = BooleanType::from([Nop, Set, Swap, Used]);
    let budget = SearchBudget::default();

    let a1_lacks = match decide_ssp(&a1, tau, budget).decision {
        Decision::LacksSsp(atom) => atom.names(&a1) == ("s0", "s1"),
        _ => false,
    };
    let a1_has = decide_ssp(&a1, tilde, budget).decision == Decision::HasSsp;
    let a2_has = [tau, tilde]
        .iter()
        .all(|&t| decide_ssp(&a2, t, budget).decision == Decision::HasSsp);
    let propagated = propagate_region(&a3, tilde, true, &[Used, Swap, Set]);
    let supports = propagated.as_ref().map(|r| r.support.clone());
    let normalized = propagated
        .as_ref()
        .and_then(|r| normalize_region(&a3, tilde, r).ok())
        .map(|r| r.signature);
    let fig4 = supports == Some(vec![true, true, false, true]) && normalized == Some(vec![Nop, Swap, Set]);
    Verdict::check(
        a1_lacks && a1_has && a2_has && fig4,
        format!("A1 lacks at (s0,s1): {a1_lacks}, A1 has: {a1_has}, A2 has both: {a2_has}, propagation and normalization: {fig4}"),
    )
}

/// One seeded type from every classification row.
fn types_per_row(rng: &mut ChaCha8Rng) -> Vec<BooleanType> {
    use rand::seq::SliceRandom;
    let all = enumerate_types();
    (1..=10u8)
        .map(|row| {
            let members: Vec<BooleanType> = all.iter().filter(|(_, c)| c.row == row).map(|(t, _)| *t).collect();
            *members.choose(rng).unwrap()
        })
        .collect()
}

fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let types = types_per_row(&mut rng);
    let (mut systems, mut checked, mut mismatches) = (0u64, 0u64, 0u64);
    for_each_small_ts(4, 3, |small| {
        let ts = small.to_ts();
        systems += 1;
        for &tau in &types {
            checked += 1;
            let engine = decide_ssp(&ts, tau, SearchBudget::unlimited()).decision;
            if engine != brute_force_decide(&ts, tau).unwrap().decision {
                mismatches += 1;
            }
        }
    });
    let random_types: Vec<BooleanType> = (0..20).map(|_| random_type(&mut rng)).collect();
    let mut random_checked = 0;
    for _ in 0..200 {
        let ts = random_ts(&mut rng, &RandomTsParams::default());
        for &tau in &random_types {
            random_checked += 1;
            let engine = decide_ssp(&ts, tau, SearchBudget::unlimited()).decision;
            if engine != brute_force_decide(&ts, tau).unwrap().decision {
                mismatches += 1;
            }
        }
    }
    Verdict::check(
        mismatches == 0,
        format!("{systems} small systems x 10 types = {checked}, random {random_checked}, mismatches {mismatches}"),
    )
}

fn nop_inp_round_trip() -> Verdict {
    let inst = gen_nop_inp(&example_formula());
    let tau = nop_inp_type();
    let sizes = (inst.ts.num_states(), inst.ts.num_events()) == (45, 26);
    let has = decide_ssp(&inst.ts, tau, SearchBudget::default()).decision == Decision::HasSsp;
    let witness = match gen_nop_inp_witness(&inst, &BTreeSet::from([0, 4])) {
        Ok(set) => {
            let regions: Vec<Region> = set.into_iter().map(|r| r.region).collect();
            regions.iter().all(|r| is_region(&inst.ts, tau, r)) && first_unseparated(&inst.ts, &regions).is_none()
        }
        Err(_) => false,
    };
    let unsat = unsat_formula();
    let oracle_unsat = cm_oracle(&unsat).unwrap().is_none();
    let hard = gen_nop_inp(&unsat);
    let alpha_names = hard.alpha.names(&hard.ts) == ("t_4_0", "t_5_0");
    let alpha = solve_atom(&hard.ts, tau, hard.alpha, SearchBudget::default()) == AtomVerdict::Unsolvable;
    let lacks = matches!(
        decide_ssp(&hard.ts, tau, SearchBudget::default()).decision,
        Decision::LacksSsp(_)
    );
    Verdict::check(
        sizes && has && witness && oracle_unsat && alpha_names && alpha && lacks,
        format!(
            "45/26: {sizes}, has SSP: {has}, witness set: {witness}, m=4 unsat: {oracle_unsat}, alpha unsolvable: {}, lacks SSP: {lacks}",
            alpha_names && alpha
        ),
    )
}

fn supports(ts: &TransitionSystem, tau: BooleanType, normalized: bool) -> BTreeSet<Vec<bool>> {
    brute_force_regions(ts, tau)
        .unwrap()
        .into_iter()
        .filter(|r| !normalized || is_normalized(ts, r))
        .map(|r| r.support)
        .collect()
}

fn extension_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
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
    let (mut decisions, mut support_checks, mut failures) = (0, 0, 0);
    for i in 0..100 {
        let a = random_ts(&mut rng, &params);
        let b = extend(&a, ExtensionKind::Backward).unwrap();
        let c = extend(&a, ExtensionKind::OnewayLoop).unwrap();
        let d = extend(&a, ExtensionKind::Loop).unwrap();
        let da = decide_ssp(&a, base, budget).decision;
        let ok = da == decide_ssp(&b, for_b, budget).decision
            && da == decide_ssp(&d, for_d, budget).decision
            && decide_ssp(&a, base_c, budget).decision == decide_ssp(&c, for_c, budget).decision;
        decisions += 1;
        failures += !ok as usize;
        if i < 20 {
            support_checks += 1;
            let sa = supports(&a, base, false);
            let ok = sa == supports(&b, for_b, true)
                && sa == supports(&d, for_d, true)
                && supports(&a, base_c, false) == supports(&c, for_c, true);
            failures += !ok as usize;
        }
    }
    Verdict::check(
        failures == 0,
        format!("{decisions} decision checks, {support_checks} support-level checks, failures {failures}"),
    )
}

fn nop_free_reduction() -> Verdict {
    let inst = gen_nop_free(&example_formula());
    let m = inst.formula.m();
    let states = inst.ts.num_states();
    let bi = inst.ts.is_bi_directed();
    let alpha_names = inst.alpha.names(&inst.ts) == ("g_0_2", "g_0_4");
    let tau = swap_free_type();
    let (region_ok, facts, flipped) = match gen_nop_free_alpha_region(&inst, &BTreeSet::from([0, 4])) {
        Ok(r) => {
            let valid = is_region(&inst.ts, tau, &r) && r.separates(inst.alpha.first, inst.alpha.second);
            let f = flip_region(&r);
            (
                valid,
                gadget_facts(&inst, &r).all(),
                is_region(&inst.ts, flip_type(tau), &f),
            )
        }
        Err(_) => (false, false, false),
    };
    let hard = gen_nop_free(&unsat_formula());
    let unsolvable = solve_atom(&hard.ts, tau, hard.alpha, SearchBudget::default()) == AtomVerdict::Unsolvable;
    let rest = bi && alpha_names && region_ok && facts && flipped && unsolvable;
    let detail = format!(
        "{states} states (expected 1135), bi-directed: {bi}, alpha region: {}, gadget facts: {facts}, flip to {{swap,used}}: {flipped}, m=4 alpha unsolvable: {unsolvable}",
        alpha_names && region_ok
    );
    let mut v = Verdict::check(rest && states == 1135, detail);
    // The construction's components sum to 188m+1 states, not 189m+1.
    v.known = rest && states == 188 * m + 1;
    v
}

fn swap_core_family() -> Verdict {
    let omegas = [vec![], vec![Inp], vec![Out], vec![Inp, Out]];
    let types: Vec<BooleanType> = omegas
        .iter()
        .map(|w| w.iter().copied().chain([Swap]).collect())
        .collect();
    let (mut checked, mut shortcut, mut mismatches, mut large_has) = (0, 0, 0, 0);
    for_each_small_ts(4, 2, |small| {
        let ts = small.to_ts();
        for &tau in &types {
            checked += 1;
            let oracle = brute_force_decide(&ts, tau).unwrap().decision;
            let allowed = allowed_supports(&ts, tau).unwrap();
            // Shortcut witnesses need not be the oracle's first atom, but
            // no region may separate them.
            let agrees = |d: &Decision| match d {
                Decision::LacksSsp(atom) => {
                    oracle.label() == "lacks_ssp"
                        && !allowed.iter().any(|s| (s >> atom.first ^ s >> atom.second) & 1 == 1)
                }
                other => *other == oracle,
            };
            if let Some(d) = fast_path_swap_core(&ts, tau).unwrap() {
                shortcut += 1;
                mismatches += !agrees(&d) as usize;
            }
            let full = decide_swap_core(&ts, tau, SearchBudget::unlimited()).unwrap().decision;
            mismatches += !agrees(&full) as usize;
            if oracle == Decision::HasSsp && ts.num_states() > 2 {
                large_has += 1;
            }
        }
    });
    Verdict::check(
        mismatches == 0 && large_has == 0,
        format!("{checked} instances, {shortcut} decided by the shortcut, mismatches {mismatches}, SSP with more than 2 states {large_has}"),
    )
}

fn engine_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let budget = SearchBudget::unlimited();
    let (mut monotone, mut flip, mut normal) = (0, 0, 0);
    for _ in 0..200 {
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
                .map(|r| normalize_region(&ts, with_nop, r).unwrap())
                .collect();
            if first_unseparated(&ts, &normalized).is_some() || !normalized.iter().all(|r| is_region(&ts, with_nop, r))
            {
                normal += 1;
            }
        }
    }
    Verdict::check(
        monotone + flip + normal == 0,
        format!("200 instances; violations: monotonicity {monotone}, flip {flip}, normalization {normal}"),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "interaction table", secs(1), interaction_table),
        run(2, "classification", secs(1), classification),
        run(3, "fixtures", secs(1), fixtures),
        run(4, "oracle equivalence", secs(120), oracle_equivalence),
        run(5, "nop-inp reduction", secs(60), nop_inp_round_trip),
        run(6, "extension equivalence", secs(120), extension_equivalence),
        run(7, "nop-free reduction", secs(300), nop_free_reduction),
        run(8, "swap-core family", secs(30), swap_core_family),
        run(9, "engine properties", secs(120), engine_properties),
    ];
    if results.iter().any(|ok| !ok) {
        std::process::exit(1);
    }
}
