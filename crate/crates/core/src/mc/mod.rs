//! On-the-fly CTL model checking over a bounded prefix.
//!
//! Queries are rewritten to four searches (`EF p`, `EG p`, `EF (p && EF q)`
//! and `EF (p && EG q)`), possibly negated. Final states carry an implicit
//! self-loop, so `EG p` holds when some path of `p` states ends in a final
//! state. Nested queries attach a boolean mark to every frontier entry.
//!
//! The layered strategy pops one cluster at a time, runs
//! [`clustered_next_border`] from it and pushes the resulting clusters.
//! Without a heuristic the frontier is a stack whose clusters from one
//! border are taken in discovery order; with one it is kept sorted by the
//! weight of each cluster's representative, ties going to the oldest entry.

pub mod heuristic;
pub mod predicate;
pub mod query;
pub mod sweep;

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

pub use heuristic::{builtin_heuristics, Heuristic, Order, Weight};
pub use predicate::Pred;
pub use query::{Base, Plan, Query};
pub use sweep::{sweep_indicators, Indicator, IndicatorSweepResult};

use crate::error::Result;
use crate::layers::{self, clustered_next_border, next_border, CutSpec, Stats, Visit, Visitor};
use crate::semantics::{State, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// One breadth-first search over the whole prefix.
    Width,
    /// Border-to-border depth-first search over clusters.
    #[default]
    Layered,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "width" => Ok(Strategy::Width),
            "layered" | "layered-dfs" | "dfs" => Ok(Strategy::Layered),
            _ => Err(format!("unknown strategy `{s}` (expected width or layered)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub strategy: Strategy,
    /// Cut list for the layered strategy; `None` picks one automatically.
    pub cuts: Option<Vec<CutSpec>>,
    pub heuristic: Option<Heuristic>,
    pub budget: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            strategy: Strategy::Layered,
            cuts: None,
            heuristic: None,
            budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    pub stats: Stats,
}

struct Search<'s, 'm> {
    sys: &'s System<'m>,
    base: &'s Base,
}

impl Visitor<bool> for Search<'_, '_> {
    fn visit(&mut self, s: &State, parent: &bool) -> Result<Visit<bool>> {
        let sys = self.sys;
        Ok(match self.base {
            Base::EF(p) => {
                if p.eval(sys, s)? {
                    Visit::Found
                } else {
                    Visit::Continue(false)
                }
            }
            Base::EG(p) => {
                if p.eval(sys, s)? {
                    Visit::Continue(false)
                } else {
                    Visit::Prune
                }
            }
            Base::EFEF(p, q) => {
                let marked = *parent || p.eval(sys, s)?;
                if marked && q.eval(sys, s)? {
                    Visit::Found
                } else {
                    Visit::Continue(marked)
                }
            }
            Base::EFEG(p, q) => {
                let marked = q.eval(sys, s)? && (*parent || p.eval(sys, s)?);
                Visit::Continue(marked)
            }
        })
    }

    fn on_final(&mut self, _: &State, tag: &bool) -> Result<bool> {
        Ok(match self.base {
            Base::EF(_) | Base::EFEF(..) => false,
            Base::EG(_) => true,
            Base::EFEG(..) => *tag,
        })
    }
}

type Cluster = Vec<(State, bool)>;

/// Pending clusters of the layered strategy.
enum Frontier {
    Stack(Vec<Cluster>),
    Sorted {
        heuristic: Heuristic,
        /// Keyed by weight, then by insertion number.
        entries: BTreeMap<(Weight, u64), Cluster>,
        next: u64,
    },
}

impl Frontier {
    fn push_border(&mut self, clusters: Vec<Cluster>) -> Result<()> {
        match self {
            Frontier::Stack(stack) => stack.extend(clusters.into_iter().rev()),
            Frontier::Sorted {
                heuristic,
                entries,
                next,
            } => {
                for cluster in clusters {
                    let representative = cluster
                        .iter()
                        .map(|(s, _)| s)
                        .min_by(|a, b| (&a.valuation, *a).cmp(&(&b.valuation, *b)))
                        .expect("clusters are non-empty");
                    let w = heuristic.weight(representative)?;
                    entries.insert((w, *next), cluster);
                    *next += 1;
                }
            }
        }
        Ok(())
    }

    fn pop(&mut self) -> Option<Cluster> {
        match self {
            Frontier::Stack(stack) => stack.pop(),
            Frontier::Sorted {
                heuristic, entries, ..
            } => {
                let key = match heuristic.order {
                    Order::Ascending => {
                        // Heaviest first; among equal weights the oldest.
                        let (w, _) = entries.last_key_value()?.0.clone();
                        entries.range((w.clone(), 0)..).next()?.0.clone()
                    }
                    Order::Descending => entries.first_key_value()?.0.clone(),
                };
                entries.remove(&key)
            }
        }
    }

    fn states(&self) -> usize {
        match self {
            Frontier::Stack(stack) => stack.iter().map(Vec::len).sum(),
            Frontier::Sorted { entries, .. } => entries.values().map(Vec::len).sum(),
        }
    }
}

/// Evaluates `query` on the bounded prefix of `sys`.
pub fn check(sys: &System<'_>, query: &Query, opts: &CheckOptions) -> Result<CheckOutcome> {
    let plan = query.plan();
    let (found, stats) = search(sys, &plan.base, opts)?;
    Ok(CheckOutcome {
        holds: found != plan.negated,
        stats,
    })
}

/// Runs one base search; `true` when a witness exists.
pub fn search(sys: &System<'_>, base: &Base, opts: &CheckOptions) -> Result<(bool, Stats)> {
    let mut stats = Stats::default();
    let mut visitor = Search { sys, base };
    let init = sys.initial();
    let tag = match visitor.visit(&init, &false)? {
        Visit::Found => return Ok((true, stats)),
        Visit::Prune => return Ok((false, stats)),
        Visit::Continue(tag) => tag,
    };
    let roots = vec![(init, tag)];
    match opts.strategy {
        Strategy::Width => {
            let out = next_border(sys, &[], roots, &mut visitor, &mut stats, opts.budget)?;
            Ok((out.found, stats))
        }
        Strategy::Layered => {
            let cuts = match &opts.cuts {
                Some(c) => c.clone(),
                None => layers::select_cut(sys.model, false)?.into_iter().collect(),
            };
            let mut frontier = match &opts.heuristic {
                None => Frontier::Stack(Vec::new()),
                Some(h) => Frontier::Sorted {
                    heuristic: h.clone(),
                    entries: BTreeMap::new(),
                    next: 0,
                },
            };
            frontier.push_border(vec![roots])?;
            while let Some(cluster) = frontier.pop() {
                let (clusters, found) =
                    clustered_next_border(sys, &cuts, cluster, &mut visitor, &mut stats, opts.budget)?;
                if found {
                    return Ok((true, stats));
                }
                frontier.push_border(clusters)?;
                stats.peak_frontier = stats.peak_frontier.max(frontier.states());
            }
            Ok((false, stats))
        }
    }
}

/// Number of distinct states in the bounded prefix.
pub fn count_states(sys: &System<'_>, budget: usize) -> Result<usize> {
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::new();
    let init = sys.initial();
    seen.insert(init.clone());
    queue.push_back(init);
    while let Some(s) = queue.pop_front() {
        if seen.len() > budget {
            return Err(crate::error::Error::BudgetExceeded(budget));
        }
        for (_, n) in sys.successors(&s)? {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    Ok(seen.len())
}
