//! Backtracking search for a region solving one atom.
//!
//! Supports are tracked in a union-find with parity: every class stores
//! whether its members are equal or complementary to the root, and the root
//! may carry a known bit. Event signatures are 8-bit domains. Each edge is
//! kept arc consistent over the pair `(sup(s), sup(t))` and the domain of its
//! event, which also derives equalities from nop/swap-like domains.

use crate::interaction::{BooleanType, Interaction};
use crate::region::{is_region, Region};
use crate::ts::TransitionSystem;

const UNKNOWN: u8 = 2;

/// Per interaction, by index: bit `2x+y` is set when it maps `x` to `y`.
const PAIR_MASKS: [u8; 8] = [0b1001, 0b0100, 0b0010, 0b0101, 0b1010, 0b0110, 0b1000, 0b0001];

/// For every signature domain and set of admissible `(x, y)` pairs: the
/// surviving domain and the pairs it supports.
const FILTER: [(u8, u8); 256 * 16] = {
    let mut table = [(0u8, 0u8); 256 * 16];
    let mut dom = 0;
    while dom < 256 {
        let mut pairs = 0;
        while pairs < 16 {
            let (mut keep, mut support) = (0u8, 0u8);
            let mut i = 0;
            while i < 8 {
                let m = PAIR_MASKS[i];
                if dom & (1 << i) != 0 && m & pairs != 0 {
                    keep |= 1 << i;
                    support |= m & pairs;
                }
                i += 1;
            }
            table[dom * 16 + pairs as usize] = (keep, support);
            pairs += 1;
        }
        dom += 1;
    }
    table
};

/// `PAIRS[ds << 4 | dt << 2 | rel]`: the pairs `(x, y)` with `x` in bit
/// domain `ds`, `y` in `dt` and `x xor y == rel` (any relation when
/// `rel == 2`).
const PAIRS: [u8; 64] = {
    let mut t = [0u8; 64];
    let mut i = 0;
    while i < 64 {
        let (ds, dt, rel) = (i >> 4, i >> 2 & 3, i & 3);
        let mut m = 0u8;
        let mut x = 0;
        while x < 2 {
            let mut y = 0;
            while y < 2 {
                if ds >> x & 1 == 1 && dt >> y & 1 == 1 && (rel == 2 || rel == x ^ y) {
                    m |= 1 << (2 * x + y);
                }
                y += 1;
            }
            x += 1;
        }
        t[i] = m;
        i += 1;
    }
    t
};

/// For a set of pairs: the bit domains of its first and second components.
const PROJECT: [(u8, u8); 16] = {
    let mut t = [(0u8, 0u8); 16];
    let mut pairs = 0;
    while pairs < 16 {
        let xs = (pairs & 0b0011 != 0) as u8 | ((pairs & 0b1100 != 0) as u8) << 1;
        let ys = (pairs & 0b0101 != 0) as u8 | ((pairs & 0b1010 != 0) as u8) << 1;
        t[pairs] = (xs, ys);
        pairs += 1;
    }
    t
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    State(usize),
    Event(usize),
}

struct Conflict;

/// Union-find entry of one state. `next` links the members of a class in
/// a cycle; `value` is only meaningful at roots.
#[derive(Clone, Copy)]
struct Entry {
    parent: u32,
    size: u32,
    next: u32,
    parity: u8,
    value: u8,
}

#[derive(Clone)]
struct Domains {
    cells: Vec<Entry>,
    sig: Vec<u8>,
}

/// Reusable search context for one transition system and type.
type Frame = (Domains, Var, u8);

/// Buffers kept per thread between solvers, so that deciding many tiny
/// systems does not allocate per call.
#[derive(Default)]
struct Scratch {
    order: Vec<usize>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    pool: Vec<Domains>,
    stack: Vec<Frame>,
}

thread_local! {
    static SCRATCH: std::cell::Cell<Scratch> = std::cell::Cell::new(Scratch::default());
}

pub(crate) struct Solver<'a> {
    ts: &'a TransitionSystem,
    tau: BooleanType,
    /// Events by descending edge count, filled on first use.
    order: Vec<usize>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    /// Arc-consistent domains before any atom constraint; `None` when no
    /// region exists at all.
    base: Option<Domains>,
    /// Spare domain buffers, reused across nodes.
    pool: Vec<Domains>,
    stack: Vec<Frame>,
}

impl Drop for Solver<'_> {
    fn drop(&mut self) {
        let mut pool = std::mem::take(&mut self.pool);
        pool.extend(self.base.take());
        let scratch = Scratch {
            order: std::mem::take(&mut self.order),
            queue: std::mem::take(&mut self.queue),
            queued: std::mem::take(&mut self.queued),
            pool,
            stack: std::mem::take(&mut self.stack),
        };
        SCRATCH.with(|c| c.set(scratch));
    }
}

pub(crate) enum Outcome {
    Solved(Region),
    Unsolvable,
    Exhausted,
}

impl<'a> Solver<'a> {
    pub(crate) fn new(ts: &'a TransitionSystem, tau: BooleanType) -> Self {
        let Scratch {
            mut order,
            mut queue,
            mut queued,
            pool,
            stack,
        } = SCRATCH.with(|c| c.take());
        order.clear();
        queue.clear();
        queued.clear();
        queued.resize(ts.num_edges(), false);
        let mut solver = Solver {
            ts,
            tau,
            order,
            queue,
            queued,
            base: None,
            pool,
            stack,
        };
        let mut root = solver.root();
        for k in 0..ts.num_edges() {
            solver.enqueue(k);
        }
        if solver.propagate(&mut root).is_ok() {
            solver.base = Some(root);
        } else {
            solver.pool.push(root);
        }
        solver.clear_queue();
        solver
    }

    fn root(&mut self) -> Domains {
        let n = self.ts.num_states();
        let mut d = self.pool.pop().unwrap_or(Domains {
            cells: Vec::new(),
            sig: Vec::new(),
        });
        d.cells.clear();
        d.cells.extend((0..n as u32).map(|s| Entry {
            parent: s,
            size: 1,
            next: s,
            parity: 0,
            value: UNKNOWN,
        }));
        d.sig.clear();
        d.sig.resize(self.ts.num_events(), self.tau.bits());
        d
    }

    /// Searches for a region with `sup(a) != sup(b)`. `nodes` is incremented
    /// per expanded node; the search stops once it reaches `limit`.
    pub(crate) fn solve(&mut self, a: usize, b: usize, limit: Option<u64>, nodes: &mut u64) -> Outcome {
        let over = |n: u64| limit.is_some_and(|l| n >= l);
        if over(*nodes) {
            return Outcome::Exhausted;
        }
        *nodes += 1;
        let Some(base) = &self.base else {
            return Outcome::Unsolvable;
        };
        let mut root = self.pool.pop().unwrap_or_else(|| base.clone());
        root.clone_from(base);
        self.clear_queue();
        if self.relate(&mut root, a, b, 1).is_err() || self.propagate(&mut root).is_err() {
            self.pool.push(root);
            return Outcome::Unsolvable;
        }
        let Some(var) = self.choose(&root) else {
            let outcome = self.finish(&mut root, a, b);
            self.pool.push(root);
            return outcome;
        };
        let values = self.values(&root, var);
        let mut stack = std::mem::take(&mut self.stack);
        stack.push((root, var, values));

        while let Some(frame) = stack.last_mut() {
            let (base, var, values) = frame;
            if *values == 0 {
                if let Some((spent, _, _)) = stack.pop() {
                    self.pool.push(spent);
                }
                continue;
            }
            let value = values.trailing_zeros() as u8;
            *values &= *values - 1;
            if over(*nodes) {
                self.recycle(stack);
                return Outcome::Exhausted;
            }
            *nodes += 1;
            let mut child = self.pool.pop().unwrap_or_else(|| base.clone());
            child.clone_from(base);
            let var = *var;
            self.clear_queue();
            if self.decide(&mut child, var, value).is_err() || self.propagate(&mut child).is_err() {
                self.pool.push(child);
                continue;
            }
            match self.choose(&child) {
                None => {
                    let outcome = self.finish(&mut child, a, b);
                    self.pool.push(child);
                    if let Outcome::Solved(r) = outcome {
                        self.recycle(stack);
                        return Outcome::Solved(r);
                    }
                }
                Some(next) => {
                    let values = self.values(&child, next);
                    stack.push((child, next, values));
                }
            }
        }
        self.recycle(stack);
        Outcome::Unsolvable
    }

    fn recycle(&mut self, mut stack: Vec<Frame>) {
        self.pool.extend(stack.drain(..).map(|(d, _, _)| d));
        self.stack = stack;
    }

    fn finish(&self, d: &mut Domains, a: usize, b: usize) -> Outcome {
        let n = self.ts.num_states();
        let support: Vec<bool> = (0..n)
            .map(|s| {
                let (r, p) = find(d, s);
                (d.cells[r].value ^ p) == 1
            })
            .collect();
        let signature: Vec<Interaction> = d
            .sig
            .iter()
            .map(|&m| Interaction::from_index(m.trailing_zeros() as usize).expect("non-empty domain"))
            .collect();
        let region = Region { support, signature };
        if is_region(self.ts, self.tau, &region) && region.separates(a, b) {
            Outcome::Solved(region)
        } else {
            Outcome::Unsolvable
        }
    }

    /// Next variable to branch on: the initial support, then events in
    /// descending edge count, then any state still unknown. Once every
    /// support is known the remaining event domains only hold interactions
    /// valid on all their edges, so any choice completes a region.
    fn choose(&mut self, d: &Domains) -> Option<Var> {
        let unknown = (0..self.ts.num_states()).find(|&s| {
            let (r, _) = find(d, s);
            d.cells[r].value == UNKNOWN
        })?;
        let iota = self.ts.initial();
        let (r, _) = find(d, iota);
        if d.cells[r].value == UNKNOWN {
            return Some(Var::State(iota));
        }
        if self.order.is_empty() {
            self.order.extend(0..self.ts.num_events());
            self.order
                .sort_by_key(|&e| std::cmp::Reverse(self.ts.event_edges(e).len()));
        }
        if let Some(&e) = self.order.iter().find(|&&e| d.sig[e].count_ones() > 1) {
            return Some(Var::Event(e));
        }
        Some(Var::State(unknown))
    }

    /// Branch values of `var` as a bitmask, tried lowest first.
    fn values(&self, d: &Domains, var: Var) -> u8 {
        match var {
            Var::State(_) => 0b11,
            Var::Event(e) => d.sig[e],
        }
    }

    fn decide(&mut self, d: &mut Domains, var: Var, value: u8) -> Result<(), Conflict> {
        match var {
            Var::State(s) => self.assign(d, s, value),
            Var::Event(e) => {
                d.sig[e] = 1 << value;
                for &k in self.ts.event_edges(e) {
                    self.enqueue(k);
                }
                Ok(())
            }
        }
    }

    fn clear_queue(&mut self) {
        for k in self.queue.drain(..) {
            self.queued[k] = false;
        }
    }

    fn enqueue(&mut self, k: usize) {
        if !self.queued[k] {
            self.queued[k] = true;
            self.queue.push(k);
        }
    }

    fn touch_class(&mut self, d: &Domains, root: usize) {
        let mut s = root;
        loop {
            for &k in self.ts.incident_edges(s) {
                self.enqueue(k);
            }
            s = d.cells[s].next as usize;
            if s == root {
                break;
            }
        }
    }

    fn assign(&mut self, d: &mut Domains, s: usize, v: u8) -> Result<(), Conflict> {
        let (r, p) = find(d, s);
        let want = v ^ p;
        match d.cells[r].value {
            UNKNOWN => {
                d.cells[r].value = want;
                self.touch_class(d, r);
                Ok(())
            }
            x if x == want => Ok(()),
            _ => Err(Conflict),
        }
    }

    /// Records `sup(s) xor sup(t) = diff`.
    fn relate(&mut self, d: &mut Domains, s: usize, t: usize, diff: u8) -> Result<(), Conflict> {
        let (rs, ps) = find(d, s);
        let (rt, pt) = find(d, t);
        if rs == rt {
            return if ps ^ pt == diff { Ok(()) } else { Err(Conflict) };
        }
        let link = ps ^ pt ^ diff;
        let (big, small) = if d.cells[rs].size >= d.cells[rt].size {
            (rs, rt)
        } else {
            (rt, rs)
        };
        let (vb, vs) = (d.cells[big].value, d.cells[small].value);
        if vb != UNKNOWN && vs != UNKNOWN && vb != vs ^ link {
            return Err(Conflict);
        }
        // Members whose known bit changes, and the smaller side whose
        // relations to the other side become known.
        if vb == UNKNOWN && vs != UNKNOWN {
            self.touch_class(d, big);
        }
        self.touch_class(d, small);
        if vb == UNKNOWN && vs != UNKNOWN {
            d.cells[big].value = vs ^ link;
        }
        d.cells[small].parent = big as u32;
        d.cells[small].parity = link;
        d.cells[big].size += d.cells[small].size;
        let (nb, ns) = (d.cells[big].next, d.cells[small].next);
        d.cells[big].next = ns;
        d.cells[small].next = nb;
        Ok(())
    }

    fn propagate(&mut self, d: &mut Domains) -> Result<(), Conflict> {
        while let Some(k) = self.queue.pop() {
            // `k` stays marked while revised: its own updates never undo
            // its consistency, so it need not be requeued by them.
            let result = self.revise(d, k);
            self.queued[k] = false;
            result?;
        }
        Ok(())
    }

    fn revise(&mut self, d: &mut Domains, k: usize) -> Result<(), Conflict> {
        let edge = self.ts.edges()[k];
        let (s, e, t) = (edge.source, edge.event, edge.target);
        let (rs, ps) = find(d, s);
        let (rt, pt) = find(d, t);
        let ds = dom(d.cells[rs].value, ps);
        let dt = dom(d.cells[rt].value, pt);
        let rel = if rs == rt { (ps ^ pt) as usize } else { 2 };
        let pairs = PAIRS[((ds as usize) << 4 | (dt as usize) << 2 | rel) & 63];
        let (keep, support) = FILTER[(d.sig[e] as usize) << 4 | (pairs & 15) as usize];
        if keep == 0 {
            return Err(Conflict);
        }
        if keep != d.sig[e] {
            d.sig[e] = keep;
            for &j in self.ts.event_edges(e) {
                self.enqueue(j);
            }
        }
        let (xs, ys) = PROJECT[(support & 15) as usize];
        if ds == 0b11 && xs != 0b11 {
            self.assign(d, s, xs >> 1)?;
        }
        if dt == 0b11 && ys != 0b11 {
            self.assign(d, t, ys >> 1)?;
        }
        if rel == 2 {
            let same = support & 0b1001 != 0;
            let differ = support & 0b0110 != 0;
            if same != differ {
                self.relate(d, s, t, differ as u8)?;
            }
        }
        Ok(())
    }
}

/// Root of `s` and the parity of `s` relative to it. Union by size keeps
/// chains logarithmic, so there is no path compression.
fn find(d: &Domains, s: usize) -> (usize, u8) {
    let mut r = s;
    let mut p = 0;
    loop {
        let cell = d.cells[r];
        if cell.parent as usize == r {
            return (r, p);
        }
        p ^= cell.parity;
        r = cell.parent as usize;
    }
}

fn dom(root_value: u8, parity: u8) -> u8 {
    if root_value == UNKNOWN {
        0b11
    } else {
        1 << (root_value ^ parity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::Interaction::*;
    use crate::ts::validate_ts;

    /// Bit `2x+y` is set when the interaction maps `x` to `y`.
    fn pair_mask(i: Interaction) -> u8 {
        let mut m = 0;
        for x in [false, true] {
            if let Some(y) = i.apply(x) {
                m |= 1 << (2 * x as u8 + y as u8);
            }
        }
        m
    }

    #[test]
    fn pair_mask_table_matches_interactions() {
        for i in Interaction::ALL {
            assert_eq!(PAIR_MASKS[i.index()], pair_mask(i), "{i:?}");
        }
    }

    #[test]
    fn pair_masks() {
        assert_eq!(pair_mask(Nop), 0b1001);
        assert_eq!(pair_mask(Swap), 0b0110);
        assert_eq!(pair_mask(Inp), 0b0100);
        assert_eq!(pair_mask(Free), 0b0001);
    }

    #[test]
    fn parity_find_tracks_relations() {
        let ts = validate_ts("a", &[("a", "x", "b"), ("b", "x", "c"), ("c", "x", "d")]).unwrap();
        let mut solver = Solver::new(&ts, BooleanType::from([Swap]));
        let mut d = solver.root();
        solver.relate(&mut d, 0, 1, 1).ok().unwrap();
        solver.relate(&mut d, 1, 2, 1).ok().unwrap();
        solver.relate(&mut d, 2, 3, 1).ok().unwrap();
        assert_eq!(find(&d, 3).1 ^ find(&d, 0).1, 1);
        assert_eq!(find(&d, 2).1 ^ find(&d, 0).1, 0);
        assert!(solver.relate(&mut d, 0, 2, 1).is_err());
    }

    #[test]
    fn three_state_swap_path_is_unsolvable_at_the_ends() {
        let ts = validate_ts("a", &[("a", "x", "b"), ("b", "y", "c")]).unwrap();
        let mut solver = Solver::new(&ts, BooleanType::from([Swap]));
        let mut nodes = 0;
        assert!(matches!(solver.solve(0, 2, None, &mut nodes), Outcome::Unsolvable));
        assert!(matches!(solver.solve(0, 1, None, &mut nodes), Outcome::Solved(_)));
    }
}
