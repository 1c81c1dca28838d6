//! Width-first exploration carrying per-path `(min, max)` bounds of
//! indicator expressions.
//!
//! Two paths reaching the same state with different bounds give two
//! versions of that state; both are kept and explored.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::predicate::{Pred, StateEnv};
use crate::error::{Error, Result};
use crate::model::expr::{Expr, Scope};
use crate::model::Model;
use crate::rational::Rational;
use crate::semantics::{State, System};
use crate::syntax;

#[derive(Debug, Clone, PartialEq, Eq)]
enum IndicatorKind {
    Numeric(Expr),
    /// A condition counted as 1 when it holds and 0 otherwise.
    Boolean(Pred),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indicator {
    pub name: String,
    kind: IndicatorKind,
}

impl Indicator {
    /// Accepts `expr` or `name=expr`. A condition becomes a 0/1 indicator.
    /// The whole text is tried first, so `x = 0.5` is a condition on `x`.
    pub fn parse(m: &Model, spec: &str) -> Result<Indicator> {
        match Indicator::unnamed(m, spec) {
            Ok(kind) => Ok(Indicator {
                name: spec.trim().to_string(),
                kind,
            }),
            Err(err) => {
                let Some((name, rest)) = spec.split_once('=') else {
                    return Err(err);
                };
                let name = name.trim();
                if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(err);
                }
                Ok(Indicator {
                    name: name.to_string(),
                    kind: Indicator::unnamed(m, rest)?,
                })
            }
        }
    }

    fn unnamed(m: &Model, src: &str) -> Result<IndicatorKind> {
        let ast = syntax::parse(src)?;
        let components = m.component_names();
        let agents = m.agent_names();
        let scope = Scope {
            components: &components,
            agents: Some(&agents),
        };
        match scope.lower_expr(&ast) {
            Ok(e) => Ok(IndicatorKind::Numeric(e)),
            Err(Error::Parse { .. }) => Ok(IndicatorKind::Boolean(Pred::lower(m, &ast)?)),
            Err(e) => Err(e),
        }
    }

    pub fn value(&self, sys: &System<'_>, s: &State) -> Result<Rational> {
        match &self.kind {
            IndicatorKind::Numeric(e) => e
                .eval(&StateEnv(s))
                .map_err(|e| e.into_error(&self.name)),
            IndicatorKind::Boolean(p) => Ok(if p.eval(sys, s)? {
                Rational::one()
            } else {
                Rational::zero()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Range {
    pub min: Rational,
    pub max: Rational,
}

impl Range {
    fn point(v: Rational) -> Range {
        Range {
            min: v.clone(),
            max: v,
        }
    }

    fn include(&self, v: &Rational) -> Range {
        Range {
            min: self.min.clone().min(v.clone()),
            max: self.max.clone().max(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalVersion {
    pub state: State,
    /// One range per indicator.
    pub bounds: Vec<Range>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorSweepResult {
    pub names: Vec<String>,
    /// Final-state versions in discovery order.
    pub finals: Vec<FinalVersion>,
    pub expanded: usize,
}

impl IndicatorSweepResult {
    /// Smallest minimum and largest maximum of indicator `i` over all
    /// final versions.
    pub fn global(&self, i: usize) -> Option<Range> {
        let mut it = self.finals.iter().map(|f| &f.bounds[i]);
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, r| Range {
            min: acc.min.min(r.min.clone()),
            max: acc.max.max(r.max.clone()),
        }))
    }
}

pub fn sweep_indicators(
    sys: &System<'_>,
    indicators: &[Indicator],
    budget: usize,
) -> Result<IndicatorSweepResult> {
    let values = |s: &State| {
        indicators
            .iter()
            .map(|ind| ind.value(sys, s))
            .collect::<Result<Vec<_>>>()
    };
    let init = sys.initial();
    let bounds: Vec<Range> = values(&init)?.into_iter().map(Range::point).collect();
    let mut seen: HashSet<(State, Vec<Range>)> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((init.clone(), bounds.clone()));
    queue.push_back((init, bounds));
    let mut finals = Vec::new();
    let mut expanded = 0;
    while let Some((s, bounds)) = queue.pop_front() {
        expanded += 1;
        if expanded > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        let succs = sys.successors(&s)?;
        if succs.is_empty() {
            finals.push(FinalVersion { state: s, bounds });
            continue;
        }
        for (_, next) in succs {
            let next_bounds: Vec<Range> = values(&next)?
                .iter()
                .zip(&bounds)
                .map(|(v, r)| r.include(v))
                .collect();
            let entry = (next, next_bounds);
            if seen.insert(entry.clone()) {
                queue.push_back(entry);
            }
        }
    }
    Ok(IndicatorSweepResult {
        names: indicators.iter().map(|i| i.name.clone()).collect(),
        finals,
        expanded,
    })
}
