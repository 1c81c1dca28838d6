//! Translation of a model into a high-level Petri net with three places.
//!
//! Place `A` holds the locality vector, `C` the clock vector and `V` the
//! valuation. There is always exactly one token per place, so a marking is a
//! triple. Every agent transition and every reset becomes a net transition,
//! plus a single `time` transition. Guards and effects are closures over the
//! model; the net is used as an independent oracle for [`crate::semantics`].

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::model::{Model, Valuation};
use crate::semantics::{self, Bound, Event, Semantics, State, TransitionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    A,
    C,
    V,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Place::A => "s_A",
            Place::C => "s_C",
            Place::V => "s_V",
        })
    }
}

/// One token per place.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Marking {
    pub a: Vec<usize>,
    pub c: Vec<u64>,
    pub v: Valuation,
}

impl From<&State> for Marking {
    fn from(s: &State) -> Self {
        Marking {
            a: s.localities.clone(),
            c: s.clocks.clone(),
            v: s.valuation.clone(),
        }
    }
}

impl From<&Marking> for State {
    fn from(mk: &Marking) -> Self {
        State {
            localities: mk.a.clone(),
            clocks: mk.c.clone(),
            valuation: mk.v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetTransitionKind {
    Transition(TransitionId),
    Reset(usize),
    Time,
}

pub type Guard<'a> = Box<dyn Fn(&Marking) -> bool + 'a>;
pub type Effect<'a> = Box<dyn Fn(&Marking) -> Result<Marking> + 'a>;

pub struct NetTransition<'a> {
    pub name: String,
    pub kind: NetTransitionKind,
    pub reads: Vec<Place>,
    pub writes: Vec<Place>,
    pub guard_text: String,
    guard: Guard<'a>,
    effect: Effect<'a>,
}

pub struct HlNet<'a> {
    pub model: &'a Model,
    pub accelerated: bool,
    pub places: [Place; 3],
    pub transitions: Vec<NetTransition<'a>>,
    pub initial: Marking,
}

pub fn translate(m: &Model, accelerated: bool) -> HlNet<'_> {
    let mut transitions = Vec::new();
    for (i, agent) in m.agents.iter().enumerate() {
        for (k, t) in agent.transitions.iter().enumerate() {
            let (from, to, iv, f) = (t.from, t.to, t.interval, t.transform);
            transitions.push(NetTransition {
                name: t.id.clone(),
                kind: NetTransitionKind::Transition(TransitionId { agent: i, index: k }),
                reads: vec![Place::A, Place::C, Place::V],
                writes: vec![Place::A, Place::V],
                guard_text: format!(
                    "x[{i}] = {} and {} <= y[{i}] <= {}",
                    agent.localities[from], iv.a, iv.b
                ),
                guard: Box::new(move |mk| mk.a[i] == from && iv.a <= mk.c[i] && mk.c[i] <= iv.b),
                effect: Box::new(move |mk| {
                    let mut out = mk.clone();
                    out.a[i] = to;
                    out.v = m.eval_transform(f, &mk.v)?;
                    Ok(out)
                }),
            });
        }
    }
    for (i, agent) in m.agents.iter().enumerate() {
        let (last, period) = (agent.final_locality(), agent.reset_period);
        transitions.push(NetTransition {
            name: format!("r_{}", agent.name),
            kind: NetTransitionKind::Reset(i),
            reads: vec![Place::A, Place::C],
            writes: vec![Place::A, Place::C],
            guard_text: format!("x[{i}] = {} and y[{i}] = {period}", agent.localities[last]),
            guard: Box::new(move |mk| mk.a[i] == last && mk.c[i] == period),
            effect: Box::new(move |mk| {
                let mut out = mk.clone();
                out.a[i] = 0;
                out.c[i] = 0;
                Ok(out)
            }),
        });
    }
    let time = if accelerated {
        NetTransition {
            name: "time".into(),
            kind: NetTransitionKind::Time,
            reads: vec![Place::A, Place::C],
            writes: vec![Place::C],
            guard_text: "delta(x, y) > 0".into(),
            guard: Box::new(move |mk| {
                semantics::zone_info(m, &State::from(mk)).is_ok_and(|z| z.delta > 0)
            }),
            effect: Box::new(move |mk| {
                let delta = semantics::zone_info(m, &State::from(mk))?.delta;
                let mut out = mk.clone();
                out.c.iter_mut().for_each(|c| *c += delta);
                Ok(out)
            }),
        }
    } else {
        // G_i holds when agent i sits in some locality whose largest
        // outgoing upper bound (or reset period, for the final one) is not
        // reached yet.
        let limits: Vec<Vec<u64>> = m
            .agents
            .iter()
            .map(|agent| {
                (0..agent.localities.len())
                    .map(|l| {
                        if l == agent.final_locality() {
                            agent.reset_period
                        } else {
                            agent.post(l).map(|(_, t)| t.interval.b).max().unwrap_or(0)
                        }
                    })
                    .collect()
            })
            .collect();
        let text = limits
            .iter()
            .enumerate()
            .map(|(i, ls)| {
                let parts: Vec<String> = ls
                    .iter()
                    .enumerate()
                    .map(|(j, lim)| {
                        format!("(x[{i}] = {} and y[{i}] < {lim})", m.agents[i].localities[j])
                    })
                    .collect();
                format!("({})", parts.join(" or "))
            })
            .collect::<Vec<_>>()
            .join(" and ");
        NetTransition {
            name: "time".into(),
            kind: NetTransitionKind::Time,
            reads: vec![Place::A, Place::C],
            writes: vec![Place::C],
            guard_text: text,
            guard: Box::new(move |mk| {
                limits
                    .iter()
                    .enumerate()
                    .all(|(i, ls)| mk.c[i] < ls[mk.a[i]])
            }),
            effect: Box::new(|mk| {
                let mut out = mk.clone();
                out.c.iter_mut().for_each(|c| *c += 1);
                Ok(out)
            }),
        }
    };
    transitions.push(time);
    HlNet {
        model: m,
        accelerated,
        places: [Place::A, Place::C, Place::V],
        transitions,
        initial: Marking::from(&State::initial(m)),
    }
}

impl<'a> HlNet<'a> {
    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.name == name)
    }

    pub fn is_enabled(&self, mk: &Marking, t: usize) -> bool {
        (self.transitions[t].guard)(mk)
    }

    pub fn enabled(&self, mk: &Marking) -> Vec<usize> {
        (0..self.transitions.len())
            .filter(|&t| self.is_enabled(mk, t))
            .collect()
    }

    pub fn fire(&self, mk: &Marking, t: usize) -> Result<Marking> {
        if !self.is_enabled(mk, t) {
            return Err(Error::NotEnabled(self.transitions[t].name.clone()));
        }
        (self.transitions[t].effect)(mk)
    }

    /// Replaces the guard of a transition (used to seed faults in tests).
    pub fn set_guard(&mut self, t: usize, text: impl Into<String>, guard: Guard<'a>) {
        self.transitions[t].guard_text = text.into();
        self.transitions[t].guard = guard;
    }

    /// The event of the semantics that corresponds to firing `t` at `mk`.
    pub fn event(&self, mk: &Marking, t: usize, next: &Marking) -> Event {
        match self.transitions[t].kind {
            NetTransitionKind::Transition(id) => Event::Fire(id),
            NetTransitionKind::Reset(i) => Event::Reset(i),
            NetTransitionKind::Time => Event::Delay(next.c[0] - mk.c[0]),
        }
    }

    /// Text listing of places and transitions.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "places: {}",
            self.places.map(|p| p.to_string()).join(", ")
        );
        let _ = writeln!(out, "transitions: {}", self.transitions.len());
        for t in &self.transitions {
            let list = |ps: &[Place]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
            let _ = writeln!(
                out,
                "  {}: reads {} writes {} guard {}",
                t.name,
                list(&t.reads),
                list(&t.writes),
                t.guard_text
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivReport {
    pub equivalent: bool,
    pub states: usize,
    /// First state where the two successor sets differ.
    pub divergence: Option<String>,
}

/// Compares the reachability graphs of the semantics and of the token game
/// state by state.
pub fn state_space_equiv(
    m: &Model,
    net: &HlNet<'_>,
    bound: &Bound,
    semantics: Semantics,
    budget: usize,
) -> Result<EquivReport> {
    let sys = semantics::System::new(m, semantics, bound.clone());
    let init = sys.initial();
    if Marking::from(&init) != net.initial {
        return Ok(EquivReport {
            equivalent: false,
            states: 0,
            divergence: Some("initial markings differ".into()),
        });
    }
    let mut seen = HashSet::from([init.clone()]);
    let mut queue = VecDeque::from([init]);
    while let Some(s) = queue.pop_front() {
        let expected: BTreeSet<(Event, State)> = sys.successors(&s)?.into_iter().collect();
        let mk = Marking::from(&s);
        let mut actual = BTreeSet::new();
        if !bound.reached(&s.valuation) {
            for t in net.enabled(&mk) {
                let next = net.fire(&mk, t)?;
                actual.insert((net.event(&mk, t, &next), State::from(&next)));
            }
        }
        if expected != actual {
            let show = |set: &BTreeSet<(Event, State)>| {
                set.iter()
                    .map(|(e, _)| e.label(m))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            return Ok(EquivReport {
                equivalent: false,
                states: seen.len(),
                divergence: Some(format!(
                    "at {}: semantics [{}], net [{}]",
                    s.display(m),
                    show(&expected),
                    show(&actual)
                )),
            });
        }
        for (_, next) in expected {
            if seen.insert(next.clone()) {
                if seen.len() > budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(EquivReport {
        equivalent: true,
        states: seen.len(),
        divergence: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;

    #[test]
    fn ex1_net_shape() {
        let m = fixtures::ex1();
        let net = translate(&m, false);
        assert_eq!(net.places.len(), 3);
        let names: Vec<&str> = net.transitions.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["t1", "t1'", "t2", "t2'", "r_A1", "r_A2", "time"]);
        assert!(net
            .transitions
            .iter()
            .filter(|t| t.writes.contains(&Place::V))
            .all(|t| matches!(t.kind, NetTransitionKind::Transition(_))));
        assert!(net.describe().contains("r_A1: reads s_A,s_C writes s_A,s_C"));
    }

    #[test]
    fn intervals_net_shape() {
        // Two transitions in the first agent, four in the second, one reset
        // per agent and the time transition.
        let m = fixtures::intervals();
        let net = translate(&m, false);
        assert_eq!(m.transition_count(), 6);
        assert_eq!(net.transitions.len(), 6 + 2 + 1);
    }

    #[test]
    fn degenerate_agent_net() {
        let json = r#"{"components": [{"name": "n", "init": 0, "x": true}],
            "agents": [{"name": "A", "localities": ["p"], "reset_period": 3,
                        "init_locality": "p"}]}"#;
        let m = Model::from_json(json).unwrap();
        let net = translate(&m, false);
        let names: Vec<&str> = net.transitions.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["r_A", "time"]);
    }

    #[test]
    fn firing() {
        let m = fixtures::ex1();
        let net = translate(&m, false);
        let time = net.transition_index("time").unwrap();
        let next = net.fire(&net.initial, time).unwrap();
        assert_eq!(next.c, vec![1, 1]);
        assert_eq!((&next.a, &next.v), (&net.initial.a, &net.initial.v));

        let r1 = net.transition_index("r_A1").unwrap();
        let mk = Marking {
            a: vec![1, 1],
            c: vec![5, 5],
            v: m.initial_valuation(),
        };
        let after = net.fire(&mk, r1).unwrap();
        assert_eq!((after.a, after.c), (vec![0, 1], vec![0, 5]));
        assert!(net.fire(&net.initial, r1).is_err());

        let mi = fixtures::intervals();
        let acc = translate(&mi, true);
        let mk = Marking {
            a: vec![1, 1],
            c: vec![4, 4],
            v: mi.initial_valuation(),
        };
        let t = acc.transition_index("time").unwrap();
        assert_eq!(acc.fire(&mk, t).unwrap().c, vec![7, 7]);
    }
}
