//! Brute-force oracles shared by the integration tests.
//!
//! Nothing here uses the layered exploration or the model checker; the
//! oracles only rely on single-step successor generation.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use mapt_core::layers::CutSpec;
use mapt_core::mc::{Pred, Query};
use mapt_core::model::{Model, Valuation};
use mapt_core::semantics::{self, Event, Semantics, State, System};

/// Fully enumerated bounded prefix.
pub struct FullGraph {
    pub states: Vec<State>,
    pub succ: Vec<Vec<usize>>,
    pub events: Vec<Vec<Event>>,
    pub index: HashMap<State, usize>,
}

pub fn full_graph(sys: &System<'_>, budget: usize) -> FullGraph {
    let mut g = FullGraph {
        states: vec![sys.initial()],
        succ: vec![Vec::new()],
        events: vec![Vec::new()],
        index: HashMap::from([(sys.initial(), 0)]),
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let s = g.states[i].clone();
        for (e, n) in sys.successors(&s).unwrap() {
            let j = match g.index.get(&n) {
                Some(&j) => j,
                None => {
                    let j = g.states.len();
                    assert!(j < budget, "prefix larger than {budget}");
                    g.states.push(n.clone());
                    g.succ.push(Vec::new());
                    g.events.push(Vec::new());
                    g.index.insert(n, j);
                    queue.push_back(j);
                    j
                }
            };
            g.succ[i].push(j);
            g.events[i].push(e);
        }
    }
    g
}

impl FullGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Successors with the self-loop added on final states.
    fn next(&self, i: usize) -> Vec<usize> {
        if self.succ[i].is_empty() {
            vec![i]
        } else {
            self.succ[i].clone()
        }
    }

    pub fn is_acyclic(&self) -> bool {
        let mut indegree = vec![0usize; self.len()];
        for s in &self.succ {
            for &j in s {
                indegree[j] += 1;
            }
        }
        let mut ready: Vec<usize> = (0..self.len()).filter(|&i| indegree[i] == 0).collect();
        let mut visited = 0;
        while let Some(i) = ready.pop() {
            visited += 1;
            for &j in &self.succ[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
        visited == self.len()
    }
}

/// CTL formulas for the oracle.
#[derive(Debug, Clone)]
pub enum Ctl {
    Atom(Pred),
    Not(Box<Ctl>),
    Or(Box<Ctl>, Box<Ctl>),
    And(Box<Ctl>, Box<Ctl>),
    EF(Box<Ctl>),
    EG(Box<Ctl>),
    AF(Box<Ctl>),
    AG(Box<Ctl>),
}

fn b(c: Ctl) -> Box<Ctl> {
    Box::new(c)
}

/// Direct CTL meaning of a query, without the rewriting used by the checker.
pub fn query_formula(q: &Query) -> Ctl {
    let a = |p: &Pred| Ctl::Atom(p.clone());
    match q {
        Query::EF(p) => Ctl::EF(b(a(p))),
        Query::EG(p) => Ctl::EG(b(a(p))),
        Query::AF(p) => Ctl::AF(b(a(p))),
        Query::AG(p) => Ctl::AG(b(a(p))),
        Query::EFEF(p, q) => Ctl::EF(b(Ctl::And(b(a(p)), b(Ctl::EF(b(a(q))))))),
        Query::EFEG(p, q) => Ctl::EF(b(Ctl::And(b(a(p)), b(Ctl::EG(b(a(q))))))),
        Query::LeadsTo(p, q) => Ctl::AG(b(Ctl::Or(b(Ctl::Not(b(a(p)))), b(Ctl::AF(b(a(q))))))),
    }
}

/// Labels every state of `g` with the truth of `f`.
pub fn label(sys: &System<'_>, g: &FullGraph, f: &Ctl) -> Vec<bool> {
    let fix = |inner: &[bool], least: bool, exists: bool| {
        let mut z = vec![!least; g.len()];
        loop {
            let mut changed = false;
            for i in 0..g.len() {
                let nexts = g.next(i);
                let step = if exists {
                    nexts.iter().any(|&j| z[j])
                } else {
                    nexts.iter().all(|&j| z[j])
                };
                let v = if least { inner[i] || step } else { inner[i] && step };
                if v != z[i] {
                    z[i] = v;
                    changed = true;
                }
            }
            if !changed {
                return z;
            }
        }
    };
    match f {
        Ctl::Atom(p) => g.states.iter().map(|s| p.eval(sys, s).unwrap()).collect(),
        Ctl::Not(x) => label(sys, g, x).into_iter().map(|v| !v).collect(),
        Ctl::Or(x, y) => label(sys, g, x)
            .into_iter()
            .zip(label(sys, g, y))
            .map(|(a, b)| a || b)
            .collect(),
        Ctl::And(x, y) => label(sys, g, x)
            .into_iter()
            .zip(label(sys, g, y))
            .map(|(a, b)| a && b)
            .collect(),
        Ctl::EF(x) => fix(&label(sys, g, x), true, true),
        Ctl::EG(x) => fix(&label(sys, g, x), false, true),
        Ctl::AF(x) => fix(&label(sys, g, x), true, false),
        Ctl::AG(x) => fix(&label(sys, g, x), false, false),
    }
}

pub fn oracle_holds(sys: &System<'_>, g: &FullGraph, q: &Query) -> bool {
    label(sys, g, &query_formula(q))[0]
}

/// States of the unbounded original semantics tagged with their time
/// distance from the initial state, up to `horizon`. Entries are
/// `(state, time, [(event, successor entry)])`.
pub struct TimedGraph {
    pub nodes: Vec<(State, u64)>,
    pub succ: Vec<Vec<(Event, usize)>>,
}

pub fn timed_graph(m: &Model, horizon: u64) -> TimedGraph {
    let init = (State::initial(m), 0u64);
    let mut index = HashMap::from([(init.clone(), 0usize)]);
    let mut g = TimedGraph {
        nodes: vec![init],
        succ: vec![Vec::new()],
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (s, t) = g.nodes[i].clone();
        for (e, n) in semantics::successors(m, &s, Semantics::Original).unwrap() {
            let nt = match e {
                Event::Delay(d) => t + d,
                _ => t,
            };
            if nt > horizon {
                continue;
            }
            let key = (n, nt);
            let j = *index.entry(key.clone()).or_insert_with(|| {
                g.nodes.push(key);
                g.succ.push(Vec::new());
                queue.push_back(g.nodes.len() - 1);
                g.nodes.len() - 1
            });
            g.succ[i].push((e, j));
        }
    }
    g
}

/// Does every run cross the position of `cut` at time `cut.t`?
///
/// Within the time slice `t`, a run enters through a delay (or starts
/// there) and leaves through a delay or by stopping. The cut holds when no
/// entry reaches an exit through instantaneous events without passing
/// through a state at the cut's position, and the position is reachable at
/// time `t`.
pub fn every_run_crosses(m: &Model, cut: &CutSpec) -> bool {
    let g = timed_graph(m, cut.t + 1);
    let at = |i: usize| g.nodes[i].1 == cut.t;
    let on_cut = |i: usize| {
        let s = &g.nodes[i].0;
        s.localities == cut.localities && s.clocks == cut.clocks
    };
    let mut entries = Vec::new();
    for (i, succ) in g.succ.iter().enumerate() {
        for (e, j) in succ {
            if e.is_delay() && at(*j) {
                entries.push(*j);
            }
        }
        if i == 0 && at(0) {
            entries.push(0);
        }
    }
    let is_exit = |i: usize| {
        let raw = semantics::successors(m, &g.nodes[i].0, Semantics::Original).unwrap();
        raw.is_empty() || raw.iter().any(|(e, _)| e.is_delay())
    };
    if !(0..g.nodes.len()).any(|i| at(i) && on_cut(i)) {
        return false;
    }
    let mut seen = HashSet::new();
    let mut stack: Vec<usize> = entries.into_iter().filter(|&i| !on_cut(i)).collect();
    while let Some(i) = stack.pop() {
        if !seen.insert(i) {
            continue;
        }
        if is_exit(i) {
            return false;
        }
        for (e, j) in &g.succ[i] {
            if !e.is_delay() && !on_cut(*j) {
                stack.push(*j);
            }
        }
    }
    true
}

/// Times `t` in `1..=lcm` lying strictly inside some shifted virtual
/// interval of some agent, computed by scanning every shift `k`.
pub fn inside_virtual_interval(m: &Model, t: u64) -> bool {
    let lcm = m.lcm_periods().unwrap();
    m.agents.iter().any(|agent| {
        let chain = mapt_core::layers::mandatory_chain(agent);
        let e = agent.reset_period as i64;
        let init = agent.init_clock as i64;
        chain.intervals.iter().any(|iv| {
            (0..=(lcm as i64 / e + 1)).any(|k| {
                let lo = iv.a as i64 + k * e - init;
                let hi = iv.b as i64 + k * e - init;
                lo < t as i64 && (t as i64) < hi
            })
        })
    })
}

/// Timed runs of one agent from its initial locality with clock 0 up to
/// time `end`, which must precede its reset. Each run is its list of
/// `(time, transition index)` and the locality where it stands at `end`.
fn agent_runs(m: &Model, agent: usize, end: u64) -> Vec<(Vec<(u64, usize)>, usize)> {
    let a = &m.agents[agent];
    assert!(end < a.reset_period && a.init_clock == 0);
    let mut out = Vec::new();
    let mut stack = vec![(a.init_locality, 0u64, Vec::new())];
    while let Some((l, now, run)) = stack.pop() {
        let limit = if l == a.final_locality() {
            a.reset_period
        } else {
            a.post(l).map(|(_, t)| t.interval.b).max().unwrap_or(0)
        };
        if end <= limit {
            out.push((run.clone(), l));
        }
        for (k, t) in a.post(l) {
            for tau in t.interval.a.max(now)..=t.interval.b.min(end) {
                let mut r: Vec<(u64, usize)> = run.clone();
                r.push((tau, k));
                stack.push((t.to, tau, r));
            }
        }
    }
    out
}

/// Valuations reachable at time `end` with every agent at `localities`,
/// over all interleavings of independently chosen timed runs.
pub fn border_valuations(m: &Model, end: u64, localities: &[usize]) -> BTreeSet<Valuation> {
    let per_agent: Vec<Vec<(Vec<(u64, usize)>, usize)>> = (0..m.agents.len())
        .map(|i| {
            agent_runs(m, i, end)
                .into_iter()
                .filter(|(_, l)| *l == localities[i])
                .collect()
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut choice = vec![0usize; per_agent.len()];
    if per_agent.iter().any(|v| v.is_empty()) {
        return out;
    }
    loop {
        let runs: Vec<&Vec<(u64, usize)>> = choice
            .iter()
            .enumerate()
            .map(|(i, &c)| &per_agent[i][c].0)
            .collect();
        interleave(m, &runs, &mut vec![0; runs.len()], m.initial_valuation(), &mut out);
        // Next combination.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] < per_agent[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn interleave(
    m: &Model,
    runs: &[&Vec<(u64, usize)>],
    pos: &mut Vec<usize>,
    v: Valuation,
    out: &mut BTreeSet<Valuation>,
) {
    let heads: Vec<(usize, u64)> = (0..runs.len())
        .filter(|&i| pos[i] < runs[i].len())
        .map(|i| (i, runs[i][pos[i]].0))
        .collect();
    let Some(earliest) = heads.iter().map(|h| h.1).min() else {
        out.insert(v);
        return;
    };
    for &(i, t) in &heads {
        if t != earliest {
            continue;
        }
        let transition = &m.agents[i].transitions[runs[i][pos[i]].1];
        let next = m.eval_transform(transition.transform, &v).unwrap();
        pos[i] += 1;
        interleave(m, runs, pos, next, out);
        pos[i] -= 1;
    }
}

/// Builds a handful of atomic and compound predicates over `m`, using
/// component values that actually occur in `g`.
pub fn generated_predicates(m: &Model, g: &FullGraph) -> Vec<Pred> {
    let mut srcs: Vec<String> = vec!["true".into(), "false".into(), "final".into()];
    for agent in &m.agents {
        for loc in &agent.localities {
            srcs.push(format!("at({}, {})", agent.name, loc));
        }
        srcs.push(format!("clock({}) >= {}", agent.name, agent.reset_period / 2));
    }
    for (ci, comp) in m.components.iter().enumerate() {
        let values: BTreeSet<_> = g.states.iter().map(|s| s.valuation.get(ci).clone()).collect();
        let values: Vec<_> = values.into_iter().collect();
        let mid = &values[values.len() / 2];
        srcs.push(format!("{} >= {}", comp.name, mid));
        srcs.push(format!("{} = {}", comp.name, values[values.len() - 1]));
        srcs.push(format!("{} < {}", comp.name, values[0]));
    }
    let atoms: Vec<Pred> = srcs.iter().map(|s| Pred::parse(m, s).unwrap()).collect();
    let mut out = atoms.clone();
    // A few compounds mixing positions and values.
    let n = atoms.len();
    for k in 0..n.min(6) {
        let p = atoms[3 + k % (n - 3)].clone();
        let q = atoms[n - 1 - k].clone();
        out.push(p.clone().and(q.clone().not()));
        out.push(p.or(q));
    }
    out
}

pub fn seven_forms(p: &Pred, q: &Pred) -> Vec<Query> {
    vec![
        Query::EF(p.clone()),
        Query::EG(p.clone()),
        Query::AF(p.clone()),
        Query::AG(p.clone()),
        Query::EFEF(p.clone(), q.clone()),
        Query::EFEG(p.clone(), q.clone()),
        Query::LeadsTo(p.clone(), q.clone()),
    ]
}
