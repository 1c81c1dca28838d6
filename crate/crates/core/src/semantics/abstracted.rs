//! Abstracted dynamics: evolutions with their delays erased.
//!
//! Each maximal evolution contributes the word of its fire/reset events and
//! the localities and valuation of the state where it ends. Two semantics
//! with the same set of labelled words are indistinguishable once time is
//! ignored.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use super::{Event, State, System};
use crate::error::{Error, Result};
use crate::model::Valuation;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbstractWord {
    pub events: Vec<Event>,
    pub localities: Vec<usize>,
    pub valuation: Valuation,
}

/// How far evolutions are followed.
#[derive(Debug, Clone, Default)]
pub struct Horizon {
    /// Maximum number of resets per agent; a reset beyond it is not taken.
    pub reset_quota: Option<Vec<u64>>,
}

impl Horizon {
    /// Evolutions of the first layer, before any reset.
    pub fn first_layer(n_agents: usize) -> Horizon {
        Horizon {
            reset_quota: Some(vec![0; n_agents]),
        }
    }

    /// One period: each agent resets `lcm / E_i` times.
    pub fn one_period(m: &crate::model::Model) -> Result<Horizon> {
        let lcm = m.lcm_periods()?;
        Ok(Horizon {
            reset_quota: Some(m.agents.iter().map(|a| lcm / a.reset_period).collect()),
        })
    }
}

type Suffixes = Rc<BTreeSet<(Vec<Event>, Vec<usize>, Valuation)>>;

struct Walker<'a, 'b> {
    sys: &'a System<'b>,
    quota: Option<&'a [u64]>,
    memo: HashMap<(State, Vec<u64>), Suffixes>,
    budget: usize,
}

impl Walker<'_, '_> {
    fn allowed(&self, e: &Event, resets: &[u64]) -> bool {
        match (e, self.quota) {
            (Event::Reset(i), Some(q)) => resets[*i] < q[*i],
            _ => true,
        }
    }

    fn suffixes(&mut self, s: &State, resets: &[u64]) -> Result<Suffixes> {
        let key = (s.clone(), resets.to_vec());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        if self.memo.len() >= self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let succs: Vec<_> = self
            .sys
            .successors(s)?
            .into_iter()
            .filter(|(e, _)| self.allowed(e, resets))
            .collect();
        let mut out = BTreeSet::new();
        if succs.is_empty() {
            out.insert((Vec::new(), s.localities.clone(), s.valuation.clone()));
        }
        for (e, next) in succs {
            let mut next_resets = resets.to_vec();
            if let Event::Reset(i) = e {
                next_resets[i] += 1;
            }
            let tail = self.suffixes(&next, &next_resets)?;
            for (word, locs, val) in tail.iter() {
                let word = if e.is_delay() {
                    word.clone()
                } else {
                    let mut w = Vec::with_capacity(word.len() + 1);
                    w.push(e);
                    w.extend_from_slice(word);
                    w
                };
                out.insert((word, locs.clone(), val.clone()));
            }
        }
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// Labelled words of all maximal evolutions from the initial state.
pub fn abstract_reachable(
    sys: &System<'_>,
    horizon: &Horizon,
    budget: usize,
) -> Result<BTreeSet<AbstractWord>> {
    let n = sys.model.agents.len();
    let mut walker = Walker {
        sys,
        quota: horizon.reset_quota.as_deref(),
        memo: HashMap::new(),
        budget,
    };
    let all = walker.suffixes(&sys.initial(), &vec![0; n])?;
    Ok(all
        .iter()
        .map(|(events, localities, valuation)| AbstractWord {
            events: events.clone(),
            localities: localities.clone(),
            valuation: valuation.clone(),
        })
        .collect())
}
