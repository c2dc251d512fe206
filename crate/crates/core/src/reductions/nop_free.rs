//! The bi-directed gadget system for the nop-free types with swap and a
//! save interaction.
//!
//! Gadgets for `l < 7m` (every edge is present in both directions):
//!
//! ```text
//! G_l  : g_l_0  -v_l-  g_l_1  -w_l-  g_l_2  -k0- g_l_3  -k1- g_l_4
//! F_l  : f_l_0  -v_l-  f_l_1  -w_l-  f_l_2  -k1- f_l_3  -k0- f_l_4
//! G'_l : gp_l_0 -vp_l- gp_l_1 -wp_l- gp_l_2 -k1- gp_l_3 -k0- gp_l_4
//! F'_l : fp_l_0 -vp_l- fp_l_1 -wp_l- fp_l_2 -k0- fp_l_3 -k1- fp_l_4
//! ```
//!
//! For clause `i = (a, b, c)`, with `v_p` short for `v_{7i+p}`:
//!
//! ```text
//! T_i_0 : k0 v_0 v_1 X_a v_2 X_b v_3 X_c v_4 v_5 k0   (states t_i_0_0 .. t_i_0_11)
//! T_i_1 : X_a v_6 X_c                                 (states t_i_1_0 .. t_i_1_3)
//! ```
//!
//! and primed twins `tp_i_*` over `k1`, `vp_*` and `Xp_*`. Two spines join
//! the gadgets at their first states:
//!
//! ```text
//! iota -otimes_0- TOP_0 -otimes_1- TOP_1 ... TOP_{14m-1}
//! iota -oplus_0-  BOT_0 -oplus_1-  BOT_1 ... BOT_{2m-1}
//! TOP_k -odot_k- G_{k/2} or F_{(k-1)/2},  TOP_k -odotp_k- the primed twin
//! BOT_k -ominus_k- T_{k/2}_0 or T_{(k-1)/2}_1,  BOT_k -ominusp_k- the primed twin
//! ```

use std::collections::BTreeSet;

use crate::classify::{flip_region, save};
use crate::engine::Atom;
use crate::interaction::{BooleanType, Interaction};
use crate::region::Region;
use crate::ts::{TransitionSystem, TsBuilder};

use super::cm::CmFormula;
use super::{check_model, region_from_events, NamedRegion, ReductionError};

pub fn swap_free_type() -> BooleanType {
    BooleanType::from([Interaction::Swap, Interaction::Free])
}

#[derive(Debug, Clone)]
pub struct NopFreeInstance {
    pub formula: CmFormula,
    pub ts: TransitionSystem,
    /// `(g_0_2, g_0_4)`.
    pub alpha: Atom,
}

/// Unprimed or primed copy of a gadget family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Plain,
    Primed,
}

impl Side {
    fn p(self) -> &'static str {
        match self {
            Side::Plain => "",
            Side::Primed => "p",
        }
    }
}

fn v(side: Side, l: usize) -> String {
    format!("v{}_{l}", side.p())
}

fn w(side: Side, l: usize) -> String {
    format!("w{}_{l}", side.p())
}

fn x(side: Side, var: usize) -> String {
    format!("X{}_{var}", side.p())
}

fn odot(side: Side, k: usize) -> String {
    format!("odot{}_{k}", side.p())
}

fn ominus(side: Side, k: usize) -> String {
    format!("ominus{}_{k}", side.p())
}

fn otimes(k: usize) -> String {
    format!("otimes_{k}")
}

fn oplus(k: usize) -> String {
    format!("oplus_{k}")
}

fn top(k: usize) -> String {
    format!("TOP_{k}")
}

fn bot(k: usize) -> String {
    format!("BOT_{k}")
}

/// States of the `j`-th gadget on the top spine (`G`, `F` alternating).
fn gf_state(side: Side, k: usize, j: usize) -> String {
    let kind = if k.is_multiple_of(2) { "g" } else { "f" };
    format!("{kind}{}_{}_{j}", side.p(), k / 2)
}

fn t_state(side: Side, i: usize, b: usize, j: usize) -> String {
    let prefix = if side == Side::Plain { "t" } else { "tp" };
    format!("{prefix}_{i}_{b}_{j}")
}

/// The key events of a G/F gadget in path order after `v` and `w`.
fn gf_keys(side: Side, k: usize) -> [&'static str; 2] {
    let is_g = k.is_multiple_of(2);
    match (side, is_g) {
        (Side::Plain, true) | (Side::Primed, false) => ["k0", "k1"],
        (Side::Plain, false) | (Side::Primed, true) => ["k1", "k0"],
    }
}

fn k_of(side: Side) -> &'static str {
    match side {
        Side::Plain => "k0",
        Side::Primed => "k1",
    }
}

/// Event labels along `T_i_0` and `T_i_1`.
fn t_events(side: Side, i: usize, clause: [usize; 3]) -> (Vec<String>, Vec<String>) {
    let vv = |p: usize| v(side, 7 * i + p);
    let k = k_of(side).to_string();
    let long = vec![
        k.clone(),
        vv(0),
        vv(1),
        x(side, clause[0]),
        vv(2),
        x(side, clause[1]),
        vv(3),
        x(side, clause[2]),
        vv(4),
        vv(5),
        k,
    ];
    let short = vec![x(side, clause[0]), vv(6), x(side, clause[2])];
    (long, short)
}

pub fn gen_nop_free(formula: &CmFormula) -> NopFreeInstance {
    let m = formula.m();
    let mut b = TsBuilder::new();
    let both = |b: &mut TsBuilder, s: &str, e: &str, t: &str| {
        b.edge(s, e, t);
        b.edge(t, e, s);
    };
    b.initial("iota");
    for k in 0..14 * m {
        let prev = if k == 0 { "iota".to_string() } else { top(k - 1) };
        both(&mut b, &prev, &otimes(k), &top(k));
        for side in [Side::Plain, Side::Primed] {
            both(&mut b, &top(k), &odot(side, k), &gf_state(side, k, 0));
            let l = k / 2;
            let labels = [
                v(side, l),
                w(side, l),
                gf_keys(side, k)[0].into(),
                gf_keys(side, k)[1].into(),
            ];
            for (j, e) in labels.iter().enumerate() {
                both(&mut b, &gf_state(side, k, j), e, &gf_state(side, k, j + 1));
            }
        }
    }
    for k in 0..2 * m {
        let prev = if k == 0 { "iota".to_string() } else { bot(k - 1) };
        both(&mut b, &prev, &oplus(k), &bot(k));
        let (i, part) = (k / 2, k % 2);
        for side in [Side::Plain, Side::Primed] {
            both(&mut b, &bot(k), &ominus(side, k), &t_state(side, i, part, 0));
            let (long, short) = t_events(side, i, formula.clauses()[i]);
            let labels = if part == 0 { long } else { short };
            for (j, e) in labels.iter().enumerate() {
                both(&mut b, &t_state(side, i, part, j), e, &t_state(side, i, part, j + 1));
            }
        }
    }
    let ts = b.build().expect("gadget construction is a valid transition system");
    let alpha = Atom::named(&ts, "g_0_2", "g_0_4").expect("gadget G_0 exists");
    NopFreeInstance {
        formula: formula.clone(),
        ts,
        alpha,
    }
}

/// Event-name lists for the witness recipes.
struct Groups {
    v: Vec<String>,
    w: Vec<String>,
    x: Vec<String>,
    odot: Vec<String>,
    ominus: Vec<String>,
}

fn groups(m: usize, vars: usize, side: Side) -> Groups {
    Groups {
        v: (0..7 * m).map(|l| v(side, l)).collect(),
        w: (0..7 * m).map(|l| w(side, l)).collect(),
        x: (0..vars).map(|var| x(side, var)).collect(),
        odot: (0..14 * m).map(|k| odot(side, k)).collect(),
        ominus: (0..2 * m).map(|k| ominus(side, k)).collect(),
    }
}

/// The `{swap, free}`-region with `swap` exactly on `events`.
fn swap_on(
    inst: &NopFreeInstance,
    name: String,
    sup_iota: bool,
    events: &[String],
) -> Result<NamedRegion, ReductionError> {
    let refs: Vec<&str> = events.iter().map(String::as_str).collect();
    region_from_events(
        &inst.ts,
        swap_free_type(),
        name,
        sup_iota,
        &refs,
        Interaction::Swap,
        Interaction::Free,
    )
}

/// The model-dependent region solving `(g_0_2, g_0_4)` under `{swap, free}`.
pub fn gen_nop_free_alpha_region(inst: &NopFreeInstance, model: &BTreeSet<usize>) -> Result<Region, ReductionError> {
    check_model(&inst.formula, model)?;
    let m = inst.formula.m();
    let vars = inst.formula.names().len();
    let (plain, primed) = (groups(m, vars, Side::Plain), groups(m, vars, Side::Primed));
    let mut events = vec!["k1".to_string()];
    for g in [&plain, &primed] {
        events.extend(g.v.iter().cloned());
        events.extend(g.w.iter().cloned());
    }
    events.extend(
        (0..vars)
            .filter(|var| !model.contains(var))
            .map(|var| x(Side::Plain, var)),
    );
    events.extend(primed.x.iter().cloned());
    events.extend((0..7 * m).map(|i| odot(Side::Plain, 2 * i + 1)));
    events.extend((0..7 * m).map(|i| odot(Side::Primed, 2 * i)));
    swap_on(inst, "R_g_2".into(), false, &events).map(|r| r.region)
}

/// Events swapped to isolate the T-gadget state at position `q` of
/// `T_{i,part}` on `side`: its two incident events, the `w` partner of each
/// swapped `v`, and for every other occurrence of a swapped variable event
/// the adjacent `v` edge (with its `w`) so that the flip is undone.
fn t_isolation(inst: &NopFreeInstance, side: Side, i: usize, part: usize, q: usize) -> Vec<String> {
    let clauses = inst.formula.clauses();
    let (long, short) = t_events(side, i, clauses[i]);
    let labels = if part == 0 { long } else { short };
    let incident = [labels[q - 1].clone(), labels[q].clone()];
    let mut out: Vec<String> = Vec::new();
    let add_v = |out: &mut Vec<String>, name: &str| {
        let l: usize = name.rsplit('_').next().and_then(|s| s.parse().ok()).expect("v index");
        out.push(name.to_string());
        out.push(w(side, l));
    };
    let xp = format!("X{}_", side.p());
    for e in &incident {
        if let Some(rest) = e.strip_prefix(&xp) {
            let var: usize = rest.parse().expect("variable index");
            out.push(e.clone());
            // Other occurrences: every clause containing `var`, in both
            // T-gadgets, except the edge being isolated here.
            for (j, clause) in clauses.iter().enumerate() {
                for (pos, &cv) in clause.iter().enumerate() {
                    if cv != var {
                        continue;
                    }
                    // Long gadget: v left of X at positions 0, 1, 2 is v_{7j+1+pos}.
                    if !(j == i && part == 0) {
                        add_v(&mut out, &v(side, 7 * j + 1 + pos));
                    }
                    if pos != 1 && !(j == i && part == 1) {
                        add_v(&mut out, &v(side, 7 * j + 6));
                    }
                }
            }
        } else if e.starts_with('v') {
            add_v(&mut out, e);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// A separative set of `{swap, free}`-regions for the nop-free system.
pub fn gen_nop_free_witness(
    inst: &NopFreeInstance,
    model: &BTreeSet<usize>,
) -> Result<Vec<NamedRegion>, ReductionError> {
    check_model(&inst.formula, model)?;
    let m = inst.formula.m();
    let vars = inst.formula.names().len();
    let (plain, primed) = (groups(m, vars, Side::Plain), groups(m, vars, Side::Primed));
    let mut out = Vec::new();

    // Everything inside the gadgets swaps; connectors are free.
    let mut inner = vec!["k0".to_string(), "k1".to_string()];
    for g in [&plain, &primed] {
        inner.extend(g.v.iter().chain(&g.w).chain(&g.x).cloned());
    }
    out.push(swap_on(inst, "R_1".into(), false, &inner)?);
    // One gadget flipped relative to its spine.
    for connector in plain
        .odot
        .iter()
        .chain(&primed.odot)
        .chain(&plain.ominus)
        .chain(&primed.ominus)
    {
        let mut events = inner.clone();
        events.push(connector.clone());
        out.push(swap_on(inst, format!("R_2_{connector}"), false, &events)?);
    }
    let mut g0 = vec!["k0".to_string(), "k1".to_string()];
    for g in [&plain, &primed] {
        g0.extend(g.odot.iter().chain(&g.v).chain(&g.x).cloned());
    }
    out.push(swap_on(inst, "R_g_0".into(), false, &g0)?);
    out.push(NamedRegion {
        name: "R_g_2".into(),
        region: gen_nop_free_alpha_region(inst, model)?,
    });
    let mut g3 = vec!["k0".to_string(), "k1".to_string()];
    g3.extend((0..m).flat_map(|i| [ominus(Side::Plain, 2 * i), ominus(Side::Primed, 2 * i)]));
    out.push(swap_on(inst, "R_g_3".into(), false, &g3)?);

    for side in [Side::Plain, Side::Primed] {
        for i in 0..m {
            for q in 2..=9 {
                let events = t_isolation(inst, side, i, 0, q);
                out.push(swap_on(inst, format!("R_t{}_{i}_0_{q}", side.p()), false, &events)?);
            }
            for q in 1..=2 {
                let events = t_isolation(inst, side, i, 1, q);
                out.push(swap_on(inst, format!("R_t{}_{i}_1_{q}", side.p()), false, &events)?);
            }
        }
    }
    for k in 0..14 * m {
        let mut events = vec![otimes(k), odot(Side::Plain, k), odot(Side::Primed, k)];
        if k + 1 < 14 * m {
            events.push(otimes(k + 1));
        }
        out.push(swap_on(inst, format!("R_top_{k}"), false, &events)?);
    }
    for k in 0..2 * m {
        let mut events = vec![oplus(k), ominus(Side::Plain, k), ominus(Side::Primed, k)];
        if k + 1 < 2 * m {
            events.push(oplus(k + 1));
        }
        out.push(swap_on(inst, format!("R_bot_{k}"), false, &events)?);
    }
    out.push(swap_on(inst, "R_iota".into(), true, &[otimes(0), oplus(0)])?);
    Ok(out)
}

/// Target kernels for transporting a `{swap, free}`-region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapKernel {
    Free,
    Used,
    Res,
    Set,
}

impl SwapKernel {
    pub fn tau(self) -> BooleanType {
        let save = match self {
            SwapKernel::Free => Interaction::Free,
            SwapKernel::Used => Interaction::Used,
            SwapKernel::Res => Interaction::Res,
            SwapKernel::Set => Interaction::Set,
        };
        BooleanType::from([Interaction::Swap, save])
    }
}

/// Moves a `{swap, free}`-region to another kernel: `used` by flipping,
/// `res` by substituting it for `free`, `set` by both.
pub fn transport(region: &Region, kernel: SwapKernel) -> Region {
    let to_res = || Region {
        support: region.support.clone(),
        signature: region
            .signature
            .iter()
            .map(|&i| if i == Interaction::Free { Interaction::Res } else { i })
            .collect(),
    };
    match kernel {
        SwapKernel::Free => region.clone(),
        SwapKernel::Used => flip_region(region),
        SwapKernel::Res => to_res(),
        SwapKernel::Set => flip_region(&to_res()),
    }
}

/// Structural facts every region solving the key atom must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GadgetFacts {
    /// One of `k0`, `k1` is swap and the other a save interaction.
    pub keys_split: bool,
    /// Every `v`, `w`, `vp`, `wp` event is swap.
    pub gadget_events_swap: bool,
    /// On the side whose key is saved, each long T-gadget has exactly one
    /// non-swap variable event.
    pub one_non_swap_per_clause: bool,
}

impl GadgetFacts {
    pub fn all(&self) -> bool {
        self.keys_split && self.gadget_events_swap && self.one_non_swap_per_clause
    }
}

pub fn gadget_facts(inst: &NopFreeInstance, region: &Region) -> GadgetFacts {
    let ts = &inst.ts;
    let sig = |name: &str| region.signature[ts.event_id(name).expect("gadget event")];
    let (k0, k1) = (sig("k0"), sig("k1"));
    let is_save = |i: Interaction| save().contains(i);
    let swap = Interaction::Swap;
    let keys_split = (k0 == swap && is_save(k1)) || (k1 == swap && is_save(k0));
    let m = inst.formula.m();
    let gadget_events_swap = [Side::Plain, Side::Primed]
        .iter()
        .all(|&side| (0..7 * m).all(|l| sig(&v(side, l)) == swap && sig(&w(side, l)) == swap));
    let side = if is_save(k0) { Side::Plain } else { Side::Primed };
    let one_non_swap_per_clause = inst
        .formula
        .clauses()
        .iter()
        .all(|c| c.iter().filter(|&&var| sig(&x(side, var)) != swap).count() == 1);
    GadgetFacts {
        keys_split,
        gadget_events_swap,
        one_non_swap_per_clause,
    }
}
