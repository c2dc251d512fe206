//! Deciding state separation: per-atom search, full decisions, separative
//! sets, embedding certificates and a brute-force oracle.

mod fast_path;
mod oracle;
mod search;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::interaction::BooleanType;
use crate::region::Region;
use crate::ts::TransitionSystem;

pub use fast_path::{decide_swap_core, fast_path_swap_core, FastPathError};
pub use oracle::{allowed_supports, brute_force_decide, brute_force_regions, OracleError, ORACLE_CAP};

/// An unordered pair of distinct states, stored by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub first: usize,
    pub second: usize,
}

impl Atom {
    pub fn new(first: usize, second: usize) -> Self {
        assert_ne!(first, second, "an atom needs two distinct states");
        Atom { first, second }
    }

    /// Looks both states up by name.
    pub fn named(ts: &TransitionSystem, first: &str, second: &str) -> Option<Self> {
        let (a, b) = (ts.state_id(first)?, ts.state_id(second)?);
        (a != b).then(|| Atom::new(a, b))
    }

    /// All atoms `(s, t)` with `s < t`, in lexicographic order of identifiers.
    pub fn all(ts: &TransitionSystem) -> impl Iterator<Item = Atom> + '_ {
        let n = ts.num_states();
        (0..n).flat_map(move |s| (s + 1..n).map(move |t| Atom::new(s, t)))
    }

    pub fn names<'t>(&self, ts: &'t TransitionSystem) -> (&'t str, &'t str) {
        (ts.state_name(self.first), ts.state_name(self.second))
    }
}

/// Limit on expanded search-tree nodes per atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
}

impl SearchBudget {
    pub const DEFAULT_NODES: u64 = 10_000_000;

    pub fn unlimited() -> Self {
        SearchBudget { max_nodes: None }
    }

    pub fn nodes(n: u64) -> Self {
        SearchBudget { max_nodes: Some(n) }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::nodes(Self::DEFAULT_NODES)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomVerdict {
    Solved(Region),
    Unsolvable,
    /// The budget ran out after expanding this many nodes.
    Exhausted(u64),
}

/// Searches for a `tau`-region solving `atom`.
pub fn solve_atom(ts: &TransitionSystem, tau: BooleanType, atom: Atom, budget: SearchBudget) -> AtomVerdict {
    solve_counted(ts, tau, atom, budget).0
}

/// [`solve_atom`] that also reports the number of expanded nodes.
pub fn solve_counted(ts: &TransitionSystem, tau: BooleanType, atom: Atom, budget: SearchBudget) -> (AtomVerdict, u64) {
    let mut solver = search::Solver::new(ts, tau);
    let mut nodes = 0;
    let verdict = run(&mut solver, atom, budget, &mut nodes);
    (verdict, nodes)
}

fn run(solver: &mut search::Solver<'_>, atom: Atom, budget: SearchBudget, nodes: &mut u64) -> AtomVerdict {
    let mut spent = 0;
    let verdict = match solver.solve(atom.first, atom.second, budget.max_nodes, &mut spent) {
        search::Outcome::Solved(r) => AtomVerdict::Solved(r),
        search::Outcome::Unsolvable => AtomVerdict::Unsolvable,
        search::Outcome::Exhausted => AtomVerdict::Exhausted(spent),
    };
    *nodes += spent;
    verdict
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    HasSsp,
    LacksSsp(Atom),
    Unknown,
}

impl Decision {
    pub fn label(&self) -> &'static str {
        match self {
            Decision::HasSsp => "has_ssp",
            Decision::LacksSsp(_) => "lacks_ssp",
            Decision::Unknown => "unknown",
        }
    }
}

/// What became of one atom during a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomStatus {
    /// Solved by `regions[index]` of the report.
    Solved(usize),
    Unsolvable,
    Exhausted(u64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub atoms_checked: u64,
    pub nodes_expanded: u64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub decision: Decision,
    /// Atoms examined, in order; the scan stops at the first unsolvable atom.
    pub verdicts: Vec<(Atom, AtomStatus)>,
    /// Regions found; separative when the decision is [`Decision::HasSsp`].
    pub regions: Vec<Region>,
    pub stats: SearchStats,
}

/// Per-state bit vectors of region supports, used to test atom coverage.
/// Word `w` of state `s` is `codes[w * states + s]`.
struct Coverage {
    codes: Vec<u64>,
    states: usize,
    count: usize,
}

impl Coverage {
    fn new(states: usize) -> Self {
        Coverage {
            codes: Vec::new(),
            states,
            count: 0,
        }
    }

    fn add(&mut self, region: &Region) {
        let (word, bit) = (self.count / 64, self.count % 64);
        if bit == 0 {
            self.codes.resize((word + 1) * self.states, 0);
        }
        let row = &mut self.codes[word * self.states..];
        for (code, &b) in row.iter_mut().zip(&region.support) {
            *code |= (b as u64) << bit;
        }
        self.count += 1;
    }

    /// Index of some added region separating the atom.
    fn separator(&self, atom: Atom) -> Option<usize> {
        self.codes.chunks(self.states.max(1)).enumerate().find_map(|(w, row)| {
            let diff = row[atom.first] ^ row[atom.second];
            (diff != 0).then(|| w * 64 + diff.trailing_zeros() as usize)
        })
    }
}

/// Decides whether `ts` has the `tau`-SSP, reusing found regions for later
/// atoms before searching.
pub fn decide_ssp(ts: &TransitionSystem, tau: BooleanType, budget: SearchBudget) -> SeparationReport {
    let started = Instant::now();
    let mut solver = search::Solver::new(ts, tau);
    let mut cover = Coverage::new(ts.num_states());
    let n = ts.num_states();
    let mut report = SeparationReport {
        decision: Decision::HasSsp,
        verdicts: Vec::with_capacity((n * n.saturating_sub(1) / 2).min(1024)),
        regions: Vec::new(),
        stats: SearchStats::default(),
    };
    let mut exhausted = false;
    for atom in Atom::all(ts) {
        report.stats.atoms_checked += 1;
        if let Some(k) = cover.separator(atom) {
            report.verdicts.push((atom, AtomStatus::Solved(k)));
            continue;
        }
        match run(&mut solver, atom, budget, &mut report.stats.nodes_expanded) {
            AtomVerdict::Solved(region) => {
                cover.add(&region);
                report.verdicts.push((atom, AtomStatus::Solved(report.regions.len())));
                report.regions.push(region);
            }
            AtomVerdict::Unsolvable => {
                report.verdicts.push((atom, AtomStatus::Unsolvable));
                report.decision = Decision::LacksSsp(atom);
                break;
            }
            AtomVerdict::Exhausted(n) => {
                report.verdicts.push((atom, AtomStatus::Exhausted(n)));
                exhausted = true;
            }
        }
    }
    if exhausted && report.decision == Decision::HasSsp {
        report.decision = Decision::Unknown;
    }
    report.stats.wall_ms = started.elapsed().as_millis() as u64;
    report
}

/// Number of uncovered atoms solved together in one parallel round.
pub const PARALLEL_BATCH: usize = 8;

/// [`decide_ssp`] solving uncovered atoms in fixed-size parallel batches on
/// `threads` workers. Results are merged in atom order, so the report does
/// not depend on scheduling.
pub fn decide_ssp_parallel(
    ts: &TransitionSystem,
    tau: BooleanType,
    budget: SearchBudget,
    threads: usize,
) -> SeparationReport {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool");
    let mut cover = Coverage::new(ts.num_states());
    let mut report = SeparationReport {
        decision: Decision::HasSsp,
        verdicts: Vec::new(),
        regions: Vec::new(),
        stats: SearchStats::default(),
    };
    let mut exhausted = false;
    let mut atoms = Atom::all(ts).peekable();
    'outer: while atoms.peek().is_some() {
        let mut batch = Vec::new();
        while batch.len() < PARALLEL_BATCH {
            let Some(atom) = atoms.next() else { break };
            report.stats.atoms_checked += 1;
            match cover.separator(atom) {
                Some(k) => report.verdicts.push((atom, AtomStatus::Solved(k))),
                None => {
                    batch.push(atom);
                    break;
                }
            }
        }
        // Gather further uncovered atoms until the batch is full.
        while batch.len() < PARALLEL_BATCH {
            let Some(&atom) = atoms.peek() else { break };
            if cover.separator(atom).is_some() {
                break;
            }
            atoms.next();
            report.stats.atoms_checked += 1;
            batch.push(atom);
        }
        let results: Vec<(AtomVerdict, u64)> =
            pool.install(|| batch.par_iter().map(|&a| solve_counted(ts, tau, a, budget)).collect());
        for (atom, (verdict, nodes)) in batch.into_iter().zip(results) {
            report.stats.nodes_expanded += nodes;
            if let Some(k) = cover.separator(atom) {
                report.verdicts.push((atom, AtomStatus::Solved(k)));
                continue;
            }
            match verdict {
                AtomVerdict::Solved(region) => {
                    cover.add(&region);
                    report.verdicts.push((atom, AtomStatus::Solved(report.regions.len())));
                    report.regions.push(region);
                }
                AtomVerdict::Unsolvable => {
                    report.verdicts.push((atom, AtomStatus::Unsolvable));
                    report.decision = Decision::LacksSsp(atom);
                    break 'outer;
                }
                AtomVerdict::Exhausted(n) => {
                    report.verdicts.push((atom, AtomStatus::Exhausted(n)));
                    exhausted = true;
                }
            }
        }
    }
    if exhausted && report.decision == Decision::HasSsp {
        report.decision = Decision::Unknown;
    }
    report.stats.wall_ms = started.elapsed().as_millis() as u64;
    report
}

/// Whether `regions` separate every atom of `ts`; returns the first atom
/// left unseparated otherwise.
pub fn first_unseparated(ts: &TransitionSystem, regions: &[Region]) -> Option<Atom> {
    let mut cover = Coverage::new(ts.num_states());
    for r in regions {
        cover.add(r);
    }
    Atom::all(ts).find(|&a| cover.separator(a).is_none())
}

/// Maps each state to the vector of its supports in the given regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingCertificate {
    pub vectors: Vec<Vec<bool>>,
    pub injective: bool,
}

pub fn embedding_certificate(ts: &TransitionSystem, regions: &[Region]) -> EmbeddingCertificate {
    let vectors: Vec<Vec<bool>> = (0..ts.num_states())
        .map(|s| regions.iter().map(|r| r.support[s]).collect())
        .collect();
    let mut sorted = vectors.clone();
    sorted.sort();
    sorted.dedup();
    let injective = sorted.len() == vectors.len();
    EmbeddingCertificate { vectors, injective }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::Interaction::*;
    use crate::region::is_region;
    use crate::ts::validate_ts;

    fn a1() -> TransitionSystem {
        validate_ts("s0", &[("s0", "a", "s1"), ("s1", "a", "s0")]).unwrap()
    }

    fn a2() -> TransitionSystem {
        validate_ts("r0", &[("r0", "b", "r1"), ("r0", "c", "r1")]).unwrap()
    }

    fn nop_inp() -> BooleanType {
        BooleanType::from([Nop, Inp])
    }

    fn tilde() -> BooleanType {
        BooleanType::from([Nop, Set, Swap, Used])
    }

    #[test]
    fn a1_atom() {
        let ts = a1();
        let atom = Atom::new(0, 1);
        match solve_atom(&ts, tilde(), atom, SearchBudget::unlimited()) {
            AtomVerdict::Solved(r) => {
                assert_eq!(r.signature, vec![Swap]);
                assert!(is_region(&ts, tilde(), &r));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            solve_atom(&ts, nop_inp(), atom, SearchBudget::unlimited()),
            AtomVerdict::Unsolvable
        );
        assert_eq!(
            solve_atom(&ts, nop_inp(), atom, SearchBudget::nodes(0)),
            AtomVerdict::Exhausted(0)
        );
    }

    #[test]
    fn decisions_on_small_fixtures() {
        let report = decide_ssp(&a2(), nop_inp(), SearchBudget::default());
        assert_eq!(report.decision, Decision::HasSsp);
        assert!(embedding_certificate(&a2(), &report.regions).injective);
        let report = decide_ssp(&a1(), nop_inp(), SearchBudget::default());
        assert_eq!(report.decision, Decision::LacksSsp(Atom::new(0, 1)));
        let single = validate_ts::<&str>("s", &[]).unwrap();
        let report = decide_ssp(&single, nop_inp(), SearchBudget::default());
        assert_eq!(report.decision, Decision::HasSsp);
        assert!(report.regions.is_empty());
    }

    #[test]
    fn certificates() {
        let two = a1();
        assert!(!embedding_certificate(&two, &[]).injective);
        let single = validate_ts::<&str>("s", &[]).unwrap();
        assert!(embedding_certificate(&single, &[]).injective);
    }

    #[test]
    fn parallel_matches_sequential() {
        let ts = validate_ts(
            "a",
            &[
                ("a", "x", "b"),
                ("b", "y", "c"),
                ("c", "x", "d"),
                ("d", "z", "a"),
                ("b", "z", "e"),
            ],
        )
        .unwrap();
        for tau in [nop_inp(), tilde(), BooleanType::from([Nop, Res, Set, Swap])] {
            let seq = decide_ssp(&ts, tau, SearchBudget::default());
            let par = decide_ssp_parallel(&ts, tau, SearchBudget::default(), 2);
            assert_eq!(seq.decision, par.decision);
            assert_eq!(
                par,
                decide_ssp_parallel(&ts, tau, SearchBudget::default(), 3).with_zero_wall()
            );
        }
    }

    impl SeparationReport {
        fn with_zero_wall(mut self) -> Self {
            self.stats.wall_ms = 0;
            self
        }
    }
}
