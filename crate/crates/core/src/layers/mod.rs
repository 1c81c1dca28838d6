//! Periodic coherent cuts and layered exploration.
//!
//! A coherent cut is a pair of locality and clock vectors that every run
//! crosses at time `t + k * lcm` for all `k`. Cuts are found per agent from
//! its mandatory chain: the localities visited on every iteration, separated
//! by virtual intervals `[ã, b̃]`. A time is rejected when some shifted
//! virtual interval strictly contains it.
//!
//! Clocks of a cut are `(t + init) mod E`; at a reset instant the agent is
//! taken after its reset (clock 0, initial locality). At the right end of a
//! virtual interval the agent is taken after the transition, at the left
//! end before it, and at a point interval after it.

mod border;
pub mod cutfile;

use std::fmt;

use serde::Serialize;

pub use border::{
    clustered_next_border, is_cut, next_border, partition_by_strong, BorderOutcome, CutCase,
    Stats, Visit, Visitor,
};

use crate::error::Result;
use crate::model::{Agent, Interval, Model};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MandatoryChain {
    /// Localities on every path from the initial to the final locality, in
    /// path order.
    pub localities: Vec<usize>,
    /// `intervals[k]` separates `localities[k]` from `localities[k + 1]`.
    pub intervals: Vec<Interval>,
}

fn reaches(agent: &Agent, from: usize, to: usize, removed: Option<usize>) -> bool {
    let mut seen = vec![false; agent.localities.len()];
    let mut stack = vec![from];
    while let Some(l) = stack.pop() {
        if l == to {
            return true;
        }
        if seen[l] || Some(l) == removed {
            continue;
        }
        seen[l] = true;
        stack.extend(agent.post(l).map(|(_, t)| t.to));
    }
    false
}

fn topological_order(agent: &Agent) -> Vec<usize> {
    let m = agent.localities.len();
    let mut indegree = vec![0usize; m];
    for t in &agent.transitions {
        indegree[t.to] += 1;
    }
    let mut ready: Vec<usize> = (0..m).filter(|&l| indegree[l] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(l) = ready.pop() {
        order.push(l);
        for (_, t) in agent.post(l) {
            indegree[t.to] -= 1;
            if indegree[t.to] == 0 {
                ready.push(t.to);
            }
        }
    }
    order
}

pub fn mandatory_chain(agent: &Agent) -> MandatoryChain {
    let fin = agent.final_locality();
    let localities: Vec<usize> = topological_order(agent)
        .into_iter()
        .filter(|&l| l == 0 || l == fin || !reaches(agent, 0, fin, Some(l)))
        .collect();
    let intervals = localities
        .windows(2)
        .map(|w| Interval {
            a: agent.post(w[0]).map(|(_, t)| t.interval.a).min().unwrap_or(0),
            b: agent.pre(w[1]).map(|(_, t)| t.interval.b).max().unwrap_or(0),
        })
        .collect();
    MandatoryChain {
        localities,
        intervals,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CutSpec {
    pub t: u64,
    pub localities: Vec<usize>,
    pub clocks: Vec<u64>,
}

impl CutSpec {
    pub fn display<'a>(&'a self, m: &'a Model) -> CutDisplay<'a> {
        CutDisplay { cut: self, model: m }
    }

    pub fn locality_names(&self, m: &Model) -> Vec<String> {
        self.localities
            .iter()
            .zip(&m.agents)
            .map(|(&l, a)| a.localities[l].clone())
            .collect()
    }
}

pub struct CutDisplay<'a> {
    cut: &'a CutSpec,
    model: &'a Model,
}

impl fmt::Display for CutDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clocks: Vec<String> = self.cut.clocks.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "{}; ({}); ({})",
            self.cut.t,
            self.cut.locality_names(self.model).join(","),
            clocks.join(",")
        )
    }
}

/// Position of one agent at a candidate cut time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AgentAt {
    Forbidden,
    /// Locality, clock, and whether the agent sits on a right endpoint
    /// (something must have happened) or a left endpoint (something must
    /// not have happened yet).
    At {
        locality: usize,
        clock: u64,
        right: bool,
        left: bool,
    },
}

/// Greatest integer strictly below `num / den` (den > 0).
fn floor_below(num: i128, den: i128) -> i128 {
    -(-num).div_euclid(den) - 1
}

fn agent_at(agent: &Agent, chain: &MandatoryChain, t: u64, exclude_endpoints: bool) -> AgentAt {
    let e = agent.reset_period as i128;
    let init = agent.init_clock as i128;
    let t = t as i128;
    let mut virtual_intervals = chain.intervals.clone();
    if exclude_endpoints && !agent.is_degenerate() {
        virtual_intervals.push(Interval {
            a: agent.reset_period,
            b: agent.reset_period,
        });
    }
    for iv in &virtual_intervals {
        let (a, b) = (iv.a as i128, iv.b as i128);
        let forbidden = if exclude_endpoints {
            let k = (t + init - a).div_euclid(e);
            k >= 0 && t <= b + k * e - init
        } else {
            let k = floor_below(t + init - a, e);
            k >= 0 && t < b + k * e - init
        };
        if forbidden {
            return AgentAt::Forbidden;
        }
    }
    let clock = ((t + init).rem_euclid(e)) as u64;
    let reset_instant = clock == 0 && t + init > 0;
    let happened = chain.intervals.iter().filter(|iv| iv.b <= clock).count();
    let right = reset_instant || chain.intervals.iter().any(|iv| iv.b == clock);
    let left = chain.intervals.iter().any(|iv| iv.a == clock && iv.b > clock);
    AgentAt::At {
        locality: chain.localities[happened],
        clock,
        right,
        left,
    }
}

/// Cut candidates for one period, `t` in `1..=lcm`.
///
/// A time is also rejected when one agent must have performed an event at
/// `t` while another must not have performed one yet: runs may then order
/// the two events either way and skip the joint position.
pub fn find_cuts(m: &Model, exclude_endpoints: bool) -> Result<Vec<CutSpec>> {
    Ok(scan(m, exclude_endpoints)?
        .into_iter()
        .flatten()
        .collect())
}

fn scan(m: &Model, exclude_endpoints: bool) -> Result<Vec<Option<CutSpec>>> {
    let lcm = m.lcm_periods()?;
    let chains: Vec<MandatoryChain> = m.agents.iter().map(mandatory_chain).collect();
    let mut out = Vec::with_capacity(lcm as usize);
    'times: for t in 1..=lcm {
        let mut localities = Vec::with_capacity(m.agents.len());
        let mut clocks = Vec::with_capacity(m.agents.len());
        let mut rights = Vec::new();
        let mut lefts = Vec::new();
        for (i, (agent, chain)) in m.agents.iter().zip(&chains).enumerate() {
            match agent_at(agent, chain, t, exclude_endpoints) {
                AgentAt::Forbidden => {
                    out.push(None);
                    continue 'times;
                }
                AgentAt::At {
                    locality,
                    clock,
                    right,
                    left,
                } => {
                    localities.push(locality);
                    clocks.push(clock);
                    if right {
                        rights.push(i);
                    }
                    if left {
                        lefts.push(i);
                    }
                }
            }
        }
        let crossing = rights.iter().any(|r| lefts.iter().any(|l| l != r));
        out.push((!crossing).then_some(CutSpec {
            t,
            localities,
            clocks,
        }));
    }
    Ok(out)
}

/// Picks the cut whose cyclic distance to the nearest rejected time is the
/// largest; ties go to the earliest time.
pub fn select_cut(m: &Model, exclude_endpoints: bool) -> Result<Option<CutSpec>> {
    let table = scan(m, exclude_endpoints)?;
    let n = table.len();
    let rejected: Vec<usize> = (0..n).filter(|&i| table[i].is_none()).collect();
    let gap = |i: usize| {
        rejected
            .iter()
            .map(|&r| {
                let d = i.abs_diff(r);
                d.min(n - d)
            })
            .min()
            .unwrap_or(n)
    };
    let mut best: Option<(usize, &CutSpec)> = None;
    for (i, cut) in table.iter().enumerate() {
        if let Some(cut) = cut {
            let g = gap(i);
            if best.is_none_or(|(bg, _)| g > bg) {
                best = Some((g, cut));
            }
        }
    }
    Ok(best.map(|(_, c)| c.clone()))
}
