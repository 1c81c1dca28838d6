//! Agents, transitions, transforms and the shared valuation.
//!
//! A [`Model`] is immutable once built. Construction goes through
//! [`Model::from_json`] (or the bundled [`fixtures`]), which resolves every
//! name and checks the structural invariants; the two behavioural
//! constraints are checked separately by [`validate`].

pub mod expr;
pub mod fixtures;
mod json;
pub mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use expr::{CmpOp, Cond, Env, Expr};
pub use validate::{AcyclicityViolation, LivenessViolation, ValidationReport};

/// One component of the shared variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub init: Rational,
    /// Member of the monotone part used to prove acyclicity.
    pub x: bool,
    /// Used when clustering border states.
    pub strong: bool,
    /// Assumed strictly positive by the monotonicity prover. The assumption
    /// is itself checked when validating.
    pub positive: bool,
}

/// Values of all components, indexed like [`Model::components`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Valuation(pub Vec<Rational>);

impl Valuation {
    pub fn get(&self, index: usize) -> &Rational {
        &self.0[index]
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Closed time interval `[a, b]` on the owning agent's clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub a: u64,
    pub b: u64,
}

impl Interval {
    pub fn contains(&self, c: u64) -> bool {
        self.a <= c && c <= self.b
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    pub from: usize,
    pub to: usize,
    /// Index into [`Model::transforms`]; `None` is the identity.
    pub transform: Option<usize>,
    pub interval: Interval,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub name: String,
    /// Ordered so that the first entry is the initial locality and the last
    /// one is the final locality.
    pub localities: Vec<String>,
    pub transitions: Vec<Transition>,
    pub reset_period: u64,
    pub init_locality: usize,
    pub init_clock: u64,
}

impl Agent {
    pub fn final_locality(&self) -> usize {
        self.localities.len() - 1
    }

    /// Outgoing transitions of locality `l`, with their indices.
    pub fn post(&self, l: usize) -> impl Iterator<Item = (usize, &Transition)> + '_ {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.from == l)
    }

    /// Incoming transitions of locality `l`, with their indices.
    pub fn pre(&self, l: usize) -> impl Iterator<Item = (usize, &Transition)> + '_ {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.to == l)
    }

    /// Only one locality: resets never change anything observable.
    pub fn is_degenerate(&self) -> bool {
        self.localities.len() == 1
    }

    pub fn locality_index(&self, name: &str) -> Option<usize> {
        self.localities.iter().position(|l| l == name)
    }
}

/// A named transform: new values for some components, the others are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transform {
    pub name: String,
    pub assignments: BTreeMap<usize, Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub components: Vec<Component>,
    pub transforms: Vec<Transform>,
    pub agents: Vec<Agent>,
}

impl Model {
    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.name == name)
    }

    pub fn component_names(&self) -> Vec<String> {
        self.components.iter().map(|c| c.name.clone()).collect()
    }

    pub fn agent_names(&self) -> Vec<String> {
        self.agents.iter().map(|a| a.name.clone()).collect()
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.name == name)
    }

    pub fn transform_index(&self, name: &str) -> Option<usize> {
        self.transforms.iter().position(|t| t.name == name)
    }

    pub fn transition_count(&self) -> usize {
        self.agents.iter().map(|a| a.transitions.len()).sum()
    }

    pub fn initial_valuation(&self) -> Valuation {
        Valuation(self.components.iter().map(|c| c.init.clone()).collect())
    }

    /// Applies a transform; `None` is the identity. The input is untouched.
    pub fn eval_transform(&self, transform: Option<usize>, v: &Valuation) -> Result<Valuation> {
        let Some(idx) = transform else {
            return Ok(v.clone());
        };
        let transform = &self.transforms[idx];
        let mut out = v.clone();
        // Every right-hand side reads the old valuation.
        for (&component, expr) in &transform.assignments {
            out.0[component] = expr
                .eval(&v.0[..])
                .map_err(|e| e.into_error(&self.components[component].name))?;
        }
        Ok(out)
    }

    /// Least common multiple of all reset periods.
    pub fn lcm_periods(&self) -> Result<u64> {
        lcm_all(self.agents.iter().map(|a| a.reset_period))
    }

    /// Returns a copy with the strong flags replaced.
    pub fn with_strong(&self, strong: &[String]) -> Result<Model> {
        let mut m = self.clone();
        for name in strong {
            if m.component_index(name).is_none() {
                return Err(Error::UnknownReference {
                    kind: "component",
                    name: name.clone(),
                });
            }
        }
        for c in &mut m.components {
            c.strong = strong.contains(&c.name);
        }
        Ok(m)
    }

    /// Returns a copy where every interval bound, period and initial clock
    /// is multiplied by `k`.
    pub fn scale_time(&self, k: u64) -> Result<Model> {
        let mul = |x: u64| {
            x.checked_mul(k)
                .ok_or_else(|| Error::Overflow(format!("scaling {x} by {k}")))
        };
        let mut m = self.clone();
        for agent in &mut m.agents {
            agent.reset_period = mul(agent.reset_period)?;
            agent.init_clock = mul(agent.init_clock)?;
            for t in &mut agent.transitions {
                t.interval = Interval {
                    a: mul(t.interval.a)?,
                    b: mul(t.interval.b)?,
                };
            }
        }
        Ok(m)
    }

    /// Finds a transition by its identifier.
    pub fn find_transition(&self, id: &str) -> Option<(usize, usize)> {
        self.agents.iter().enumerate().find_map(|(ai, a)| {
            a.transitions
                .iter()
                .position(|t| t.id == id)
                .map(|ti| (ai, ti))
        })
    }
}

pub fn lcm_all(values: impl IntoIterator<Item = u64>) -> Result<u64> {
    let mut acc: u64 = 1;
    for v in values {
        if v == 0 {
            return Err(Error::Malformed("reset period must be positive".into()));
        }
        let g = num_integer::gcd(acc, v);
        acc = (acc / g)
            .checked_mul(v)
            .ok_or_else(|| Error::Overflow(format!("lcm of reset periods exceeds {}", u64::MAX)))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_of_periods() {
        assert_eq!(lcm_all([10, 15]).unwrap(), 30);
        assert_eq!(lcm_all([5, 5]).unwrap(), 5);
        assert_eq!(lcm_all([4, 6, 10]).unwrap(), 60);
        assert!(matches!(
            lcm_all([u64::MAX, u64::MAX - 1]),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn ex1_transforms() {
        let m = fixtures::ex1();
        let v = m.initial_valuation();
        let f = |name: &str| Some(m.transform_index(name).unwrap());
        let q = |s: &str| s.parse::<Rational>().unwrap();

        let after_f1 = m.eval_transform(f("f1"), &v).unwrap();
        assert_eq!(after_f1, Valuation(vec![q("1"), q("1")]));
        assert_eq!(v, m.initial_valuation(), "input must be unchanged");
        assert_eq!(m.eval_transform(None, &v).unwrap(), v);

        let f2_then_f3 = m
            .eval_transform(f("f3"), &m.eval_transform(f("f2"), &v).unwrap())
            .unwrap();
        let f3_then_f2 = m
            .eval_transform(f("f2"), &m.eval_transform(f("f3"), &v).unwrap())
            .unwrap();
        // Hand computation: x = (0.5 + 1.3) / 2 and x = 0.5 / 2 + 1.3.
        assert_eq!(f2_then_f3, Valuation(vec![q("0.9"), q("1")]));
        assert_eq!(f3_then_f2, Valuation(vec![q("1.55"), q("1")]));
    }

    #[test]
    fn division_by_zero_names_component() {
        let json = r#"{
            "components": [{"name": "x", "init": "0", "x": true}],
            "transforms": {"bad": {"x": "1 / x"}},
            "agents": [{"name": "A", "localities": ["p", "q"],
                "transitions": [{"from": "p", "to": "q", "transform": "bad", "interval": [0, 1]}],
                "reset_period": 2, "init_locality": "p", "init_clock": 0}]
        }"#;
        let m = Model::from_json(json).unwrap();
        let err = m
            .eval_transform(Some(0), &m.initial_valuation())
            .unwrap_err();
        assert_eq!(
            err,
            Error::DivisionByZero {
                component: "x".into(),
                expr: "(1 / x)".into()
            }
        );
    }
}
