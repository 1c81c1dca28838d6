//! State-change rules: firing, reset and time passing.
//!
//! Two semantics share the firing and reset rules. The original one lets
//! time pass one unit at a time; the accelerated one jumps directly to the
//! end of the first maximal action zone (see [`zone_info`]).

pub mod abstracted;
pub mod graph;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Model, Valuation};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    /// Current locality index of each agent.
    pub localities: Vec<usize>,
    pub clocks: Vec<u64>,
    pub valuation: Valuation,
}

impl State {
    pub fn initial(m: &Model) -> State {
        State {
            localities: m.agents.iter().map(|a| a.init_locality).collect(),
            clocks: m.agents.iter().map(|a| a.init_clock).collect(),
            valuation: m.initial_valuation(),
        }
    }

    /// Same locality and clock vectors.
    pub fn same_position(&self, other: &State) -> bool {
        self.localities == other.localities && self.clocks == other.clocks
    }

    pub fn display<'a>(&'a self, m: &'a Model) -> StateDisplay<'a> {
        StateDisplay { state: self, model: m }
    }

    pub fn locality_names(&self, m: &Model) -> Vec<String> {
        self.localities
            .iter()
            .zip(&m.agents)
            .map(|(&l, a)| a.localities[l].clone())
            .collect()
    }
}

pub struct StateDisplay<'a> {
    state: &'a State,
    model: &'a Model,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.state.locality_names(self.model);
        let clocks: Vec<String> = self.state.clocks.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "(({}),({}),{})",
            names.join(","),
            clocks.join(","),
            self.state.valuation
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionId {
    pub agent: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Fire(TransitionId),
    Reset(usize),
    Delay(u64),
}

impl Event {
    pub fn is_delay(&self) -> bool {
        matches!(self, Event::Delay(_))
    }

    pub fn agent(&self) -> Option<usize> {
        match self {
            Event::Fire(t) => Some(t.agent),
            Event::Reset(a) => Some(*a),
            Event::Delay(_) => None,
        }
    }

    /// Human-readable label: the transition id, `r(agent)` or `+d`.
    pub fn label(&self, m: &Model) -> String {
        match self {
            Event::Fire(t) => m.agents[t.agent].transitions[t.index].id.clone(),
            Event::Reset(a) => format!("r({})", m.agents[*a].name),
            Event::Delay(d) => format!("+{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Original,
    Accelerated,
}

impl std::str::FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "original" => Ok(Semantics::Original),
            "accelerated" => Ok(Semantics::Accelerated),
            other => Err(format!("unknown semantics `{other}`")),
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Original => "original",
            Semantics::Accelerated => "accelerated",
        })
    }
}

/// Time-jump data of a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneInfo {
    pub b_per_agent: Vec<u64>,
    pub b: u64,
    /// Distance to the nearest lower bound that opens within `b`; 0 if none.
    pub a: u64,
    /// Length of the jump to the end of the first maximal action zone.
    pub delta: u64,
}

pub fn check_state(m: &Model, s: &State) -> Result<()> {
    let n = m.agents.len();
    if s.localities.len() != n || s.clocks.len() != n {
        return Err(Error::MalformedState(format!(
            "expected {n} localities and clocks, found {} and {}",
            s.localities.len(),
            s.clocks.len()
        )));
    }
    if s.valuation.0.len() != m.components.len() {
        return Err(Error::MalformedState(format!(
            "expected {} components, found {}",
            m.components.len(),
            s.valuation.0.len()
        )));
    }
    for (i, (&l, a)) in s.localities.iter().zip(&m.agents).enumerate() {
        if l >= a.localities.len() {
            return Err(Error::MalformedState(format!(
                "locality index {l} out of range for agent {i}"
            )));
        }
    }
    Ok(())
}

/// Fire and reset events enabled at `s`, in agent then transition order.
pub fn enabled_actions(m: &Model, s: &State) -> Vec<Event> {
    let mut out = Vec::new();
    for (i, agent) in m.agents.iter().enumerate() {
        let (l, c) = (s.localities[i], s.clocks[i]);
        for (idx, t) in agent.post(l) {
            if t.interval.contains(c) {
                out.push(Event::Fire(TransitionId { agent: i, index: idx }));
            }
        }
    }
    for (i, agent) in m.agents.iter().enumerate() {
        if s.localities[i] == agent.final_locality() && s.clocks[i] == agent.reset_period {
            out.push(Event::Reset(i));
        }
    }
    out
}

/// Whether one unit of time may pass.
pub fn time_can_increase(m: &Model, s: &State) -> bool {
    m.agents.iter().enumerate().all(|(i, agent)| {
        let (l, c) = (s.localities[i], s.clocks[i]);
        agent.post(l).any(|(_, t)| c < t.interval.b)
            || (l == agent.final_locality() && c < agent.reset_period)
    })
}

pub fn enabled_original(m: &Model, s: &State) -> Result<Vec<Event>> {
    check_state(m, s)?;
    let mut out = enabled_actions(m, s);
    if time_can_increase(m, s) {
        out.push(Event::Delay(1));
    }
    Ok(out)
}

pub fn zone_info(m: &Model, s: &State) -> Result<ZoneInfo> {
    check_state(m, s)?;
    let b_per_agent: Vec<u64> = m
        .agents
        .iter()
        .enumerate()
        .map(|(i, agent)| {
            let (l, c) = (s.localities[i], s.clocks[i]);
            if l == agent.final_locality() {
                agent.reset_period.saturating_sub(c)
            } else {
                agent
                    .post(l)
                    .map(|(_, t)| t.interval.b.saturating_sub(c))
                    .max()
                    .unwrap_or(0)
            }
        })
        .collect();
    let b = b_per_agent.iter().copied().min().unwrap_or(0);

    let mut alpha: Option<u64> = None;
    let keep_min = |slot: &mut Option<u64>, v: u64| {
        *slot = Some(slot.map_or(v, |cur: u64| cur.min(v)));
    };
    for (i, agent) in m.agents.iter().enumerate() {
        let (l, c) = (s.localities[i], s.clocks[i]);
        for (_, t) in agent.post(l) {
            if c < t.interval.a && t.interval.a - c <= b {
                keep_min(&mut alpha, t.interval.a - c);
            }
        }
        if l == agent.final_locality() && c < agent.reset_period && agent.reset_period - c <= b {
            keep_min(&mut alpha, agent.reset_period - c);
        }
    }
    let a = alpha.unwrap_or(0);

    let mut beta: Option<u64> = None;
    if a > 0 {
        for (i, agent) in m.agents.iter().enumerate() {
            let (l, c) = (s.localities[i], s.clocks[i]);
            for (_, t) in agent.post(l) {
                if t.interval.b >= c {
                    let d = t.interval.b - c;
                    if a <= d && d <= b {
                        keep_min(&mut beta, d);
                    }
                }
            }
            if l == agent.final_locality() && agent.reset_period >= c {
                let d = agent.reset_period - c;
                if d <= b {
                    keep_min(&mut beta, d);
                }
            }
        }
    }
    Ok(ZoneInfo {
        b_per_agent,
        b,
        a,
        delta: beta.unwrap_or(0),
    })
}

pub fn enabled_accelerated(m: &Model, s: &State) -> Result<Vec<Event>> {
    let zone = zone_info(m, s)?;
    let mut out = enabled_actions(m, s);
    if zone.delta > 0 {
        out.push(Event::Delay(zone.delta));
    }
    Ok(out)
}

pub fn enabled(m: &Model, s: &State, semantics: Semantics) -> Result<Vec<Event>> {
    match semantics {
        Semantics::Original => enabled_original(m, s),
        Semantics::Accelerated => enabled_accelerated(m, s),
    }
}

/// Applies `e` without checking that it is enabled.
pub fn apply(m: &Model, s: &State, e: Event) -> Result<State> {
    let mut next = s.clone();
    match e {
        Event::Fire(t) => {
            let tr = &m.agents[t.agent].transitions[t.index];
            next.localities[t.agent] = tr.to;
            next.valuation = m.eval_transform(tr.transform, &s.valuation)?;
        }
        Event::Reset(i) => {
            next.localities[i] = 0;
            next.clocks[i] = 0;
        }
        Event::Delay(d) => {
            for c in &mut next.clocks {
                *c = c
                    .checked_add(d)
                    .ok_or_else(|| Error::Overflow("clock value".into()))?;
            }
        }
    }
    Ok(next)
}

/// Applies `e` after checking it is enabled under `semantics`.
pub fn step(m: &Model, s: &State, e: Event, semantics: Semantics) -> Result<State> {
    if !enabled(m, s, semantics)?.contains(&e) {
        return Err(Error::NotEnabled(e.label(m)));
    }
    apply(m, s, e)
}

/// All successors, in the order of [`enabled`].
pub fn successors(m: &Model, s: &State, semantics: Semantics) -> Result<Vec<(Event, State)>> {
    enabled(m, s, semantics)?
        .into_iter()
        .map(|e| Ok((e, apply(m, s, e)?)))
        .collect()
}

/// Drops the delays of a trace.
pub fn project_word(trace: &[Event]) -> Vec<Event> {
    trace.iter().copied().filter(|e| !e.is_delay()).collect()
}

/// Replays a trace from the initial state.
pub fn replay(m: &Model, trace: &[Event], semantics: Semantics) -> Result<State> {
    let mut s = State::initial(m);
    for &e in trace {
        s = step(m, &s, e, semantics)?;
    }
    Ok(s)
}

/// Lower limits on components; a state whose limited components all reach
/// their limit is final.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bound {
    pub limits: Vec<(usize, Rational)>,
}

impl Bound {
    pub fn none() -> Bound {
        Bound::default()
    }

    pub fn on(m: &Model, name: &str, limit: Rational) -> Result<Bound> {
        let index = m.component_index(name).ok_or_else(|| Error::UnknownReference {
            kind: "component",
            name: name.to_string(),
        })?;
        Ok(Bound {
            limits: vec![(index, limit)],
        })
    }

    /// Parses `name=value` entries.
    pub fn parse(m: &Model, specs: &[String]) -> Result<Bound> {
        let mut limits = Vec::new();
        for spec in specs {
            let (name, value) = spec.split_once('=').ok_or_else(|| {
                Error::parse(1, 1, format!("bound `{spec}` is not of the form name=value"))
            })?;
            let index = m
                .component_index(name.trim())
                .ok_or_else(|| Error::UnknownReference {
                    kind: "component",
                    name: name.trim().to_string(),
                })?;
            let value: Rational = value
                .trim()
                .parse()
                .map_err(|e: crate::rational::ParseRationalError| Error::parse(1, name.len() + 2, e.to_string()))?;
            limits.push((index, value));
        }
        Ok(Bound { limits })
    }

    pub fn reached(&self, v: &Valuation) -> bool {
        !self.limits.is_empty() && self.limits.iter().all(|(i, lim)| v.get(*i) >= lim)
    }
}

/// A model together with a semantics and an exploration bound.
#[derive(Debug, Clone)]
pub struct System<'a> {
    pub model: &'a Model,
    pub semantics: Semantics,
    pub bound: Bound,
}

impl<'a> System<'a> {
    pub fn new(model: &'a Model, semantics: Semantics, bound: Bound) -> Self {
        System {
            model,
            semantics,
            bound,
        }
    }

    pub fn initial(&self) -> State {
        State::initial(self.model)
    }

    /// Successors within the bound; empty once the bound is reached.
    pub fn successors(&self, s: &State) -> Result<Vec<(Event, State)>> {
        if self.bound.reached(&s.valuation) {
            return Ok(Vec::new());
        }
        successors(self.model, s, self.semantics)
    }

    pub fn is_final(&self, s: &State) -> Result<bool> {
        Ok(self.successors(s)?.is_empty())
    }
}
