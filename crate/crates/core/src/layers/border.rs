use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use serde::Serialize;

use super::CutSpec;
use crate::error::{Error, Result};
use crate::semantics::{self, Semantics, State, System};

/// Why a state was classified as a border state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutCase {
    /// Original semantics: the position is a cut.
    Exact,
    /// The position is a cut and an action leaves it.
    Actionable,
    /// The predecessor sat on a cut and jumped to this state.
    JumpedFrom,
    /// The jump from the predecessor went over a cut.
    JumpedOver,
}

fn matches(cut: &CutSpec, s: &State) -> bool {
    cut.localities == s.localities && cut.clocks == s.clocks
}

/// Classifies `s`, a successor of `pre`, against the cut list.
pub fn is_cut(
    sys: &System<'_>,
    cuts: &[CutSpec],
    pre: &State,
    s: &State,
) -> Result<Option<CutCase>> {
    let m = sys.model;
    match sys.semantics {
        Semantics::Original => Ok(cuts.iter().any(|c| matches(c, s)).then_some(CutCase::Exact)),
        Semantics::Accelerated => {
            if cuts.iter().any(|c| matches(c, s)) && !semantics::enabled_actions(m, s).is_empty() {
                return Ok(Some(CutCase::Actionable));
            }
            let pure_delay = pre.localities == s.localities
                && pre.valuation == s.valuation
                && pre.clocks.iter().zip(&s.clocks).all(|(a, b)| a < b);
            if !pure_delay {
                return Ok(None);
            }
            if cuts.iter().any(|c| matches(c, pre))
                && semantics::enabled(m, pre, Semantics::Accelerated)?.len() == 1
            {
                return Ok(Some(CutCase::JumpedFrom));
            }
            let over = cuts.iter().any(|c| {
                c.localities == s.localities
                    && pre
                        .clocks
                        .iter()
                        .zip(&c.clocks)
                        .zip(&s.clocks)
                        .all(|((lo, mid), hi)| lo < mid && mid <= hi)
            });
            Ok(over.then_some(CutCase::JumpedOver))
        }
    }
}

/// What to do with a freshly generated state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Visit<T> {
    Continue(T),
    Prune,
    Found,
}

/// Callbacks driving a border computation. `T` travels with every state.
pub trait Visitor<T> {
    /// Called on every generated successor with the parent's tag.
    fn visit(&mut self, s: &State, parent: &T) -> Result<Visit<T>>;

    /// Called when an expanded state has no successor; `true` stops the
    /// search with a witness.
    fn on_final(&mut self, s: &State, tag: &T) -> Result<bool>;
}

/// Counters shared by all exploration strategies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub expanded: usize,
    pub borders: usize,
    pub clusters: usize,
    pub peak_frontier: usize,
    /// States sitting on a cut that none of the accelerated cases accepted
    /// and that have no delay to carry the crossing further.
    pub cut_unclassified: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderOutcome<T> {
    /// Border states in discovery order, deduplicated.
    pub border: Vec<(State, T)>,
    pub found: bool,
}

/// Breadth-first exploration from `roots` up to the next border.
///
/// With an empty cut list this is a plain breadth-first search of the whole
/// bounded space with global deduplication.
pub fn next_border<T, V>(
    sys: &System<'_>,
    cuts: &[CutSpec],
    roots: Vec<(State, T)>,
    visitor: &mut V,
    stats: &mut Stats,
    budget: usize,
) -> Result<BorderOutcome<T>>
where
    T: Clone + Eq + Hash,
    V: Visitor<T> + ?Sized,
{
    let mut seen: HashSet<(State, T)> = HashSet::new();
    let mut queue: VecDeque<(State, T)> = VecDeque::new();
    for root in roots {
        if seen.insert(root.clone()) {
            queue.push_back(root);
        }
    }
    let mut border_seen: HashSet<(State, T)> = HashSet::new();
    let mut border = Vec::new();
    while let Some((s, tag)) = queue.pop_front() {
        stats.expanded += 1;
        if stats.expanded > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        let succs = sys.successors(&s)?;
        if succs.is_empty() {
            if visitor.on_final(&s, &tag)? {
                return Ok(BorderOutcome { border, found: true });
            }
            continue;
        }
        for (_, next) in succs {
            let next_tag = match visitor.visit(&next, &tag)? {
                Visit::Found => return Ok(BorderOutcome { border, found: true }),
                Visit::Prune => continue,
                Visit::Continue(t) => t,
            };
            let case = if cuts.is_empty() {
                None
            } else {
                is_cut(sys, cuts, &s, &next)?
            };
            if case.is_none()
                && sys.semantics == Semantics::Accelerated
                && cuts.iter().any(|c| c.localities == next.localities && c.clocks == next.clocks)
                && !semantics::enabled(sys.model, &next, Semantics::Accelerated)?
                    .iter()
                    .any(|ev| ev.is_delay())
            {
                stats.cut_unclassified += 1;
            }
            let entry = (next, next_tag);
            if case.is_some() {
                if border_seen.insert(entry.clone()) {
                    border.push(entry);
                }
            } else if seen.insert(entry.clone()) {
                queue.push_back(entry);
                stats.peak_frontier = stats.peak_frontier.max(queue.len());
            }
        }
    }
    Ok(BorderOutcome {
        border,
        found: false,
    })
}

/// Groups border states by position and strong components, keeping the
/// order in which groups were first seen.
pub fn partition_by_strong<T: Clone>(sys: &System<'_>, border: Vec<(State, T)>) -> Vec<Vec<(State, T)>> {
    let strong: Vec<usize> = (0..sys.model.components.len())
        .filter(|&i| sys.model.components[i].strong)
        .collect();
    let mut groups: Vec<Vec<(State, T)>> = Vec::new();
    let mut index = HashMap::new();
    for (s, t) in border {
        let key = (
            s.localities.clone(),
            s.clocks.clone(),
            strong
                .iter()
                .map(|&i| s.valuation.0[i].clone())
                .collect::<Vec<_>>(),
        );
        let slot = *index.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[slot].push((s, t));
    }
    groups
}

/// Runs [`next_border`] from every state of a cluster at once and splits the
/// resulting border into clusters.
pub fn clustered_next_border<T, V>(
    sys: &System<'_>,
    cuts: &[CutSpec],
    cluster: Vec<(State, T)>,
    visitor: &mut V,
    stats: &mut Stats,
    budget: usize,
) -> Result<(Vec<Vec<(State, T)>>, bool)>
where
    T: Clone + Eq + Hash,
    V: Visitor<T> + ?Sized,
{
    let outcome = next_border(sys, cuts, cluster, visitor, stats, budget)?;
    if !outcome.border.is_empty() {
        stats.borders += 1;
    }
    let clusters = partition_by_strong(sys, outcome.border);
    stats.clusters += clusters.len();
    Ok((clusters, outcome.found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::find_cuts;
    use crate::model::fixtures;
    use crate::semantics::Bound;

    struct Plain;

    impl Visitor<()> for Plain {
        fn visit(&mut self, _: &State, _: &()) -> Result<Visit<()>> {
            Ok(Visit::Continue(()))
        }

        fn on_final(&mut self, _: &State, _: &()) -> Result<bool> {
            Ok(false)
        }
    }

    fn state(m: &crate::Model, locs: &[&str], clocks: &[u64]) -> State {
        State {
            localities: locs
                .iter()
                .zip(&m.agents)
                .map(|(l, a)| a.locality_index(l).unwrap())
                .collect(),
            clocks: clocks.to_vec(),
            valuation: m.initial_valuation(),
        }
    }

    #[test]
    fn accelerated_jump_over_cut() {
        let m = fixtures::intervals();
        let sys = System::new(&m, Semantics::Accelerated, Bound::none());
        let cut = CutSpec {
            t: 5,
            localities: vec![1, 1],
            clocks: vec![5, 5],
        };
        let pre = state(&m, &["l1_2", "l2_2"], &[4, 4]);
        let s = state(&m, &["l1_2", "l2_2"], &[7, 7]);
        assert_eq!(
            is_cut(&sys, std::slice::from_ref(&cut), &pre, &s).unwrap(),
            Some(CutCase::JumpedOver)
        );
        let pre = state(&m, &["l1_2", "l2_2"], &[5, 5]);
        assert_eq!(
            is_cut(&sys, &[cut], &pre, &s).unwrap(),
            Some(CutCase::JumpedFrom)
        );
    }

    #[test]
    fn original_exact_match_only() {
        let m = fixtures::ex1();
        let sys = System::new(&m, Semantics::Original, Bound::none());
        let cuts = find_cuts(&m, false).unwrap();
        let pre = state(&m, &["2", "4"], &[3, 3]);
        let on = state(&m, &["2", "4"], &[4, 4]);
        let off = state(&m, &["2", "3"], &[4, 4]);
        assert_eq!(is_cut(&sys, &cuts, &pre, &on).unwrap(), Some(CutCase::Exact));
        assert_eq!(is_cut(&sys, &cuts, &pre, &off).unwrap(), None);
    }

    #[test]
    fn accelerated_actionable_cut() {
        let m = fixtures::ex1();
        let sys = System::new(&m, Semantics::Accelerated, Bound::none());
        let cut = CutSpec {
            t: 1,
            localities: vec![0, 0],
            clocks: vec![1, 1],
        };
        let pre = state(&m, &["1", "3"], &[0, 0]);
        let s = state(&m, &["1", "3"], &[1, 1]);
        assert_eq!(
            is_cut(&sys, &[cut], &pre, &s).unwrap(),
            Some(CutCase::Actionable)
        );
    }

    #[test]
    fn deterministic_model_has_singleton_border() {
        let json = r#"{"components": [{"name": "n", "init": 0, "x": true}],
            "transforms": {"inc": {"n": "n + 1"}},
            "agents": [{"name": "A", "localities": ["p", "q"],
              "transitions": [{"from": "p", "to": "q", "transform": "inc", "interval": [2, 2]}],
              "reset_period": 4, "init_locality": "p"}]}"#;
        let m = crate::Model::from_json(json).unwrap();
        let sys = System::new(&m, Semantics::Original, Bound::none());
        let cuts: Vec<CutSpec> = find_cuts(&m, false)
            .unwrap()
            .into_iter()
            .filter(|c| c.t == 3)
            .collect();
        assert_eq!(cuts.len(), 1);
        let mut stats = Stats::default();
        let out = next_border(&sys, &cuts, vec![(sys.initial(), ())], &mut Plain, &mut stats, 1000).unwrap();
        assert_eq!(out.border.len(), 1);
        assert_eq!(out.border[0].0.clocks, vec![3]);
    }

    #[test]
    fn empty_cuts_explore_everything() {
        let m = fixtures::ex1();
        let sys = System::new(&m, Semantics::Original, Bound::on(&m, "y", 1.into()).unwrap());
        let g = crate::semantics::graph::Graph::explore(&sys, 100_000).unwrap();
        let mut stats = Stats::default();
        let out = next_border(&sys, &[], vec![(sys.initial(), ())], &mut Plain, &mut stats, 100_000).unwrap();
        assert!(out.border.is_empty());
        assert_eq!(stats.expanded, g.len());
    }
}
