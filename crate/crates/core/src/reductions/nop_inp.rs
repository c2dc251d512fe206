//! The gadget system for the type `{nop, inp}`.
//!
//! A spine `t_0_0 -w_0-> ... -w_{m-1}-> t_m_0 -k-> t_{m+1}_0 -v-> TOP`, one
//! path `t_i_0 -X_a-> t_i_1 -X_b-> t_i_2 -X_c-> t_i_3 -u_i-> TOP` per clause
//! `(a, b, c)`, and one path `t_0_0 -y_i-> g_i_0 -u_i-> g_i_1 -k-> g_i_2` per
//! clause. The atom `(t_m_0, t_{m+1}_0)` is solvable iff the formula has a
//! one-in-three model.

use std::collections::BTreeSet;

use crate::engine::Atom;
use crate::interaction::{BooleanType, Interaction};
use crate::ts::{TransitionSystem, TsBuilder};

use super::cm::CmFormula;
use super::{check_model, region_from_events, NamedRegion, ReductionError};

pub fn nop_inp_type() -> BooleanType {
    BooleanType::from([Interaction::Nop, Interaction::Inp])
}

#[derive(Debug, Clone)]
pub struct NopInpInstance {
    pub formula: CmFormula,
    pub ts: TransitionSystem,
    /// `(t_m_0, t_{m+1}_0)`.
    pub alpha: Atom,
}

fn t(i: usize, j: usize) -> String {
    format!("t_{i}_{j}")
}

fn x(v: usize) -> String {
    format!("X_{v}")
}

pub fn gen_nop_inp(formula: &CmFormula) -> NopInpInstance {
    let m = formula.m();
    let mut b = TsBuilder::new();
    b.initial(t(0, 0));
    for i in 0..m {
        b.edge(t(i, 0), format!("w_{i}"), t(i + 1, 0));
    }
    b.edge(t(m, 0), "k", t(m + 1, 0));
    b.edge(t(m + 1, 0), "v", "TOP");
    for (i, clause) in formula.clauses().iter().enumerate() {
        for (j, &var) in clause.iter().enumerate() {
            b.edge(t(i, j), x(var), t(i, j + 1));
        }
        b.edge(t(i, 3), format!("u_{i}"), "TOP");
        b.edge(t(0, 0), format!("y_{i}"), format!("g_{i}_0"));
        b.edge(format!("g_{i}_0"), format!("u_{i}"), format!("g_{i}_1"));
        b.edge(format!("g_{i}_1"), "k", format!("g_{i}_2"));
    }
    let ts = b.build().expect("gadget construction is a valid transition system");
    let alpha = Atom::named(&ts, &t(m, 0), &t(m + 1, 0)).expect("spine states exist");
    NopInpInstance {
        formula: formula.clone(),
        ts,
        alpha,
    }
}

/// The region with `sup(t_0_0) = 1` and `inp` exactly on `events`.
fn inp_on(inst: &NopInpInstance, name: String, events: &[String]) -> Result<NamedRegion, ReductionError> {
    let refs: Vec<&str> = events.iter().map(String::as_str).collect();
    region_from_events(
        &inst.ts,
        nop_inp_type(),
        name,
        true,
        &refs,
        Interaction::Inp,
        Interaction::Nop,
    )
}

/// The region solving the key atom: `inp` on `k` and on the model's variables.
pub fn model_region(inst: &NopInpInstance, model: &BTreeSet<usize>) -> Result<NamedRegion, ReductionError> {
    check_model(&inst.formula, model)?;
    let mut events = vec!["k".to_string()];
    events.extend(model.iter().map(|&v| x(v)));
    inp_on(inst, "R_M".into(), &events)
}

/// A separative set of `{nop, inp}`-regions built from a one-in-three model.
pub fn gen_nop_inp_witness(inst: &NopInpInstance, model: &BTreeSet<usize>) -> Result<Vec<NamedRegion>, ReductionError> {
    check_model(&inst.formula, model)?;
    let m = inst.formula.m();
    let u = |i: usize| format!("u_{i}");
    let y = |i: usize| format!("y_{i}");
    let mut out = Vec::new();

    out.push(inp_on(inst, "R_1".into(), &(0..m).map(y).collect::<Vec<_>>())?);
    for i in 0..m {
        let mut events = vec![format!("w_{i}")];
        events.extend((0..=i).map(u));
        events.extend((i + 1..m).map(y));
        out.push(inp_on(inst, format!("R_T_{i}"), &events)?);
    }
    let mut events = vec!["v".to_string()];
    events.extend((0..m).map(u));
    out.push(inp_on(inst, "R_2".into(), &events)?);
    out.push(model_region(inst, model)?);
    for i in 0..m.saturating_sub(1) {
        out.push(inp_on(
            inst,
            format!("R_G_{i}"),
            &(i + 1..m).map(y).collect::<Vec<_>>(),
        )?);
    }
    for var in 0..inst.formula.names().len() {
        let mut events = vec![x(var), "v".to_string()];
        events.extend((0..m).filter(|&i| !inst.formula.clauses()[i].contains(&var)).map(u));
        out.push(inp_on(inst, format!("R_X_{var}"), &events)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::first_unseparated;
    use crate::reductions::cm::{example_formula, unsat_formula};
    use crate::region::{is_region, Region};

    #[test]
    fn sizes() {
        let inst = gen_nop_inp(&example_formula());
        assert_eq!(
            (inst.ts.num_states(), inst.ts.num_events(), inst.ts.num_edges()),
            (45, 26, 50)
        );
        assert!(inst.ts.is_loop_free());
        assert_eq!(inst.alpha.names(&inst.ts), ("t_6_0", "t_7_0"));
        let unsat = gen_nop_inp(&unsat_formula());
        assert_eq!((unsat.ts.num_states(), unsat.ts.num_events()), (31, 18));
    }

    #[test]
    fn model_region_matches_recipe() {
        let inst = gen_nop_inp(&example_formula());
        let r = model_region(&inst, &BTreeSet::from([0, 4])).unwrap().region;
        for (e, name) in inst.ts.events().iter().enumerate() {
            let expected = if ["k", "X_0", "X_4"].contains(&name.as_str()) {
                Interaction::Inp
            } else {
                Interaction::Nop
            };
            assert_eq!(r.signature[e], expected, "{name}");
        }
        assert!(r.separates(inst.alpha.first, inst.alpha.second));
    }

    #[test]
    fn witness_set_is_valid_and_separative() {
        let inst = gen_nop_inp(&example_formula());
        let set = gen_nop_inp_witness(&inst, &BTreeSet::from([0, 4])).unwrap();
        assert!(set.iter().all(|r| is_region(&inst.ts, nop_inp_type(), &r.region)));
        let regions: Vec<Region> = set.into_iter().map(|r| r.region).collect();
        assert_eq!(first_unseparated(&inst.ts, &regions), None);
    }

    #[test]
    fn wrong_model_is_rejected() {
        let inst = gen_nop_inp(&example_formula());
        assert_eq!(
            gen_nop_inp_witness(&inst, &BTreeSet::from([0, 1])).unwrap_err(),
            ReductionError::ModelNotOneInThree { clause: 0 }
        );
    }
}
