//! Seeded random transition systems and an exhaustive enumerator of small
//! ones, for property tests and the verify harness.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::interaction::BooleanType;
use crate::ts::{Edge, TransitionSystem, TsBuilder};

#[derive(Debug, Clone, Copy)]
pub struct RandomTsParams {
    pub max_states: usize,
    pub max_events: usize,
    /// Probability of adding each candidate edge beyond the spanning tree.
    pub density: f64,
    pub loop_free: bool,
    /// Restrict every event's edges to pairwise disjoint endpoints, which
    /// keeps the backward and loop extensions deterministic.
    pub matching_events: bool,
}

impl Default for RandomTsParams {
    fn default() -> Self {
        RandomTsParams {
            max_states: 6,
            max_events: 4,
            density: 0.25,
            loop_free: false,
            matching_events: false,
        }
    }
}

fn state_name(s: usize) -> String {
    format!("s{s}")
}

fn event_name(e: usize) -> String {
    ((b'a' + e as u8) as char).to_string()
}

/// A random reachable deterministic system with 1 to `max_states` states.
pub fn random_ts<R: Rng + ?Sized>(rng: &mut R, params: &RandomTsParams) -> TransitionSystem {
    loop {
        if let Some(ts) = try_random_ts(rng, params) {
            return ts;
        }
    }
}

fn try_random_ts<R: Rng + ?Sized>(rng: &mut R, params: &RandomTsParams) -> Option<TransitionSystem> {
    let n = rng.gen_range(1..=params.max_states.max(1));
    let k = rng.gen_range(1..=params.max_events.max(1));
    // succ[s][e], and per event the states already touched by it.
    let mut succ = vec![vec![None; k]; n];
    let mut touched = vec![vec![false; n]; k];
    let mut edges = Vec::new();

    let fits = |succ: &Vec<Vec<Option<usize>>>, touched: &Vec<Vec<bool>>, s: usize, e: usize, t: usize| {
        succ[s][e].is_none()
            && !(params.loop_free && s == t)
            && !(params.matching_events && (s == t || touched[e][s] || touched[e][t]))
    };

    for t in 1..n {
        let mut options = Vec::new();
        for s in 0..t {
            for e in 0..k {
                if fits(&succ, &touched, s, e, t) {
                    options.push((s, e));
                }
            }
        }
        let &(s, e) = options.choose(rng)?;
        succ[s][e] = Some(t);
        touched[e][s] = true;
        touched[e][t] = true;
        edges.push((s, e, t));
    }
    for s in 0..n {
        for e in 0..k {
            let t = rng.gen_range(0..n);
            if rng.gen_bool(params.density) && fits(&succ, &touched, s, e, t) {
                succ[s][e] = Some(t);
                touched[e][s] = true;
                touched[e][t] = true;
                edges.push((s, e, t));
            }
        }
    }

    let mut b = TsBuilder::new();
    b.initial(state_name(0));
    for s in 0..n {
        b.state(state_name(s));
    }
    for (s, e, t) in edges {
        b.edge(state_name(s), event_name(e), state_name(t));
    }
    b.build().ok()
}

/// A uniformly random Boolean type.
pub fn random_type<R: Rng + ?Sized>(rng: &mut R) -> BooleanType {
    BooleanType::from_bits(rng.gen())
}

/// A compact accessible partial automaton: `table[s * events + e]` is the
/// successor or `-1`. States are numbered in breadth-first order from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallTs {
    pub states: usize,
    pub events: usize,
    pub table: [i8; 16],
}

impl SmallTs {
    pub fn to_ts(&self) -> TransitionSystem {
        let mut edges = Vec::new();
        for s in 0..self.states {
            for e in 0..self.events {
                let t = self.table[s * self.events + e];
                if t >= 0 {
                    edges.push(Edge {
                        source: s,
                        event: e,
                        target: t as usize,
                    });
                }
            }
        }
        // Names `s0..s3` and `a..d` are already in lexicographic order.
        let states = (0..self.states).map(state_name).collect();
        let events = (0..self.events).map(event_name).collect();
        TransitionSystem::from_indexed(states, events, 0, edges).expect("enumerated systems are valid")
    }

    /// Breadth-first renumbering after relabeling event `j` as `perm[j]`.
    fn relabeled(&self, perm: &[usize]) -> [i8; 16] {
        let (n, k) = (self.states, self.events);
        let mut order = [-1i8; 4];
        let mut queue = [0usize; 4];
        let (mut head, mut len) = (0, 1);
        order[0] = 0;
        while head < len {
            let s = queue[head];
            head += 1;
            for &pe in perm.iter().take(k) {
                let t = self.table[s * k + pe];
                if t >= 0 && order[t as usize] < 0 {
                    order[t as usize] = len as i8;
                    queue[len] = t as usize;
                    len += 1;
                }
            }
        }
        let mut out = [-1i8; 16];
        for s in 0..n {
            for (j, &pe) in perm.iter().enumerate().take(k) {
                let t = self.table[s * k + pe];
                out[order[s] as usize * k + j] = if t >= 0 { order[t as usize] } else { -1 };
            }
        }
        out
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            go(i + 1, p, out);
            p.swap(i, j);
        }
    }
    let mut out = Vec::new();
    go(0, &mut (0..k).collect(), &mut out);
    // `out[0]` is the identity.
    out
}

/// Calls `visit` once per transition system with at most `max_states`
/// states and `max_events` events, up to renaming of states and events.
/// Every event labels an edge and every state is reachable.
pub fn for_each_small_ts(max_states: usize, max_events: usize, mut visit: impl FnMut(&SmallTs)) {
    assert!(
        max_states <= 4 && max_events <= 4,
        "enumeration limited to 4 states and 4 events"
    );
    for n in 1..=max_states {
        for k in 0..=max_events {
            // The identity never yields a smaller table.
            let perms: Vec<Vec<usize>> = permutations(k).into_iter().skip(1).collect();
            let mut ts = SmallTs {
                states: n,
                events: k,
                table: [-1; 16],
            };
            fill(&mut ts, 0, 1, 0, &perms, &mut visit);
        }
    }
}

fn fill(
    ts: &mut SmallTs,
    slot: usize,
    created: usize,
    used: u8,
    perms: &[Vec<usize>],
    visit: &mut impl FnMut(&SmallTs),
) {
    let (n, k) = (ts.states, ts.events);
    if slot == n * k {
        if created == n && used == ((1u16 << k) - 1) as u8 && perms.iter().all(|p| ts.relabeled(p) >= ts.table) {
            visit(ts);
        }
        return;
    }
    let (s, e) = (slot / k, slot % k);
    if s >= created {
        return;
    }
    ts.table[slot] = -1;
    fill(ts, slot + 1, created, used, perms, visit);
    for t in 0..created {
        ts.table[slot] = t as i8;
        fill(ts, slot + 1, created, used | 1 << e, perms, visit);
    }
    if created < n {
        ts.table[slot] = created as i8;
        fill(ts, slot + 1, created + 1, used | 1 << e, perms, visit);
    }
    ts.table[slot] = -1;
}
