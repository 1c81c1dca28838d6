//! Strong liveness and acyclicity checks.
//!
//! Acyclicity relies on a small structural prover over transform
//! expressions. It only answers "strictly increasing", "non-decreasing" or
//! "unprovable"; the last answer fails validation.

use std::fmt;

use serde::Serialize;

use super::{Agent, Expr, Model};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LivenessViolation {
    pub agent: String,
    pub locality: String,
    /// Which of the four liveness clauses fails (1 to 4).
    pub clause: u8,
    pub detail: String,
}

impl fmt::Display for LivenessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "clause {} at {}.{}: {}",
            self.clause, self.agent, self.locality, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AcyclicityViolation {
    NoXComponents,
    /// No agent covers all its paths; one witness path per agent.
    UncoveredPath { agent: String, path: Vec<String> },
    /// The effect of a transform on an X component could not be proven
    /// non-decreasing.
    Unprovable {
        transform: String,
        component: String,
        reason: String,
    },
}

impl fmt::Display for AcyclicityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcyclicityViolation::NoXComponents => f.write_str("no X component is declared"),
            AcyclicityViolation::UncoveredPath { agent, path } => write!(
                f,
                "agent {agent}: path {} has no transition strictly increasing X",
                path.join(" -> ")
            ),
            AcyclicityViolation::Unprovable {
                transform,
                component,
                reason,
            } => write!(f, "transform {transform} on {component}: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub strongly_live: bool,
    pub liveness: Vec<LivenessViolation>,
    pub acyclic: bool,
    pub acyclicity: Vec<AcyclicityViolation>,
    /// Informational remarks (spurious resets, dropped positivity assumptions).
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_mapt(&self) -> bool {
        self.strongly_live && self.acyclic
    }
}

pub fn validate(m: &Model, allow_missing_x: bool) -> ValidationReport {
    let liveness = strong_liveness(m);
    let (acyclicity, notes) = acyclicity(m, allow_missing_x);
    ValidationReport {
        strongly_live: liveness.is_empty(),
        liveness,
        acyclic: acyclicity.is_empty(),
        acyclicity,
        notes,
    }
}

fn max_b<'a>(it: impl Iterator<Item = (usize, &'a super::Transition)>) -> Option<u64> {
    it.map(|(_, t)| t.interval.b).max()
}

pub fn strong_liveness(m: &Model) -> Vec<LivenessViolation> {
    let mut out = Vec::new();
    for agent in &m.agents {
        let fin = agent.final_locality();
        let violation = |l: usize, clause: u8, detail: String| LivenessViolation {
            agent: agent.name.clone(),
            locality: agent.localities[l].clone(),
            clause,
            detail,
        };
        let init = agent.init_locality;
        if init == fin {
            if agent.init_clock > agent.reset_period {
                out.push(violation(
                    init,
                    1,
                    format!(
                        "initial clock {} exceeds reset period {}",
                        agent.init_clock, agent.reset_period
                    ),
                ));
            }
        } else {
            let bound = max_b(agent.post(init)).unwrap_or(0);
            if agent.init_clock > bound {
                out.push(violation(
                    init,
                    2,
                    format!(
                        "initial clock {} exceeds the largest outgoing upper bound {bound}",
                        agent.init_clock
                    ),
                ));
            }
        }
        for l in 1..fin {
            let incoming = max_b(agent.pre(l)).unwrap_or(0);
            let outgoing = agent.post(l).map(|(_, t)| t.interval.b).min().unwrap_or(0);
            if incoming > outgoing {
                out.push(violation(
                    l,
                    3,
                    format!(
                        "largest incoming upper bound {incoming} exceeds smallest outgoing upper bound {outgoing}"
                    ),
                ));
            }
        }
        if let Some(incoming) = max_b(agent.pre(fin)) {
            if incoming > agent.reset_period {
                out.push(violation(
                    fin,
                    4,
                    format!(
                        "largest incoming upper bound {incoming} exceeds reset period {}",
                        agent.reset_period
                    ),
                ));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Unknown,
    NonNeg,
    Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Effect {
    Unprovable,
    NonDecreasing,
    StrictlyIncreasing,
}

/// Structural prover; `positive[i]` marks components known to stay > 0.
pub struct Prover<'a> {
    pub positive: &'a [bool],
}

impl Prover<'_> {
    pub fn sign(&self, e: &Expr) -> Sign {
        match e {
            Expr::Const(c) if c.is_positive() => Sign::Pos,
            Expr::Const(c) if c.is_zero() => Sign::NonNeg,
            Expr::Const(_) | Expr::Neg(_) | Expr::Sub(..) => Sign::Unknown,
            Expr::Var { index, .. } if self.positive[*index] => Sign::Pos,
            Expr::Var { .. } => Sign::Unknown,
            Expr::Clock { .. } => Sign::NonNeg,
            Expr::Add(l, r) => {
                let (a, b) = (self.sign(l), self.sign(r));
                if a == Sign::Unknown || b == Sign::Unknown {
                    Sign::Unknown
                } else {
                    a.max(b)
                }
            }
            Expr::Mul(l, r) | Expr::Div(l, r) => {
                let (a, b) = (self.sign(l), self.sign(r));
                if matches!(e, Expr::Div(..)) && b != Sign::Pos {
                    Sign::Unknown
                } else {
                    a.min(b)
                }
            }
            Expr::Min(args) => args.iter().map(|a| self.sign(a)).min().unwrap_or(Sign::Unknown),
            Expr::Max(args) => args.iter().map(|a| self.sign(a)).max().unwrap_or(Sign::Unknown),
            Expr::Ite(_, a, b) => self.sign(a).min(self.sign(b)),
        }
    }

    /// How the new value `e` compares with the old value of component `u`.
    pub fn effect(&self, e: &Expr, u: usize) -> Effect {
        match e {
            Expr::Var { index, .. } if *index == u => Effect::NonDecreasing,
            Expr::Add(l, r) => self
                .shifted(l, self.sign(r), u)
                .max(self.shifted(r, self.sign(l), u)),
            Expr::Sub(l, r) => match r.as_ref() {
                Expr::Const(c) if !c.is_positive() => {
                    let s = if c.is_zero() { Sign::NonNeg } else { Sign::Pos };
                    self.shifted(l, s, u)
                }
                _ => Effect::Unprovable,
            },
            Expr::Mul(l, r) => {
                let by_const = |inner: &Expr, factor: &Expr| match factor {
                    Expr::Const(c) if *c >= crate::rational::Rational::one() => {
                        self.scaled(inner, c > &crate::rational::Rational::one(), u)
                    }
                    _ => Effect::Unprovable,
                };
                by_const(l, r).max(by_const(r, l))
            }
            Expr::Div(l, r) => match r.as_ref() {
                Expr::Const(c) if c.is_positive() && *c <= crate::rational::Rational::one() => {
                    self.scaled(l, *c < crate::rational::Rational::one(), u)
                }
                _ => Effect::Unprovable,
            },
            Expr::Max(args) => args
                .iter()
                .map(|a| self.effect(a, u))
                .max()
                .unwrap_or(Effect::Unprovable),
            Expr::Min(args) => args
                .iter()
                .map(|a| self.effect(a, u))
                .min()
                .unwrap_or(Effect::Unprovable),
            Expr::Ite(_, a, b) => self.effect(a, u).min(self.effect(b, u)),
            _ => Effect::Unprovable,
        }
    }

    /// Effect of `base + s` where `s` has sign `s`.
    fn shifted(&self, base: &Expr, s: Sign, u: usize) -> Effect {
        let inner = self.effect(base, u);
        match (inner, s) {
            (Effect::Unprovable, _) | (_, Sign::Unknown) => Effect::Unprovable,
            (_, Sign::Pos) => Effect::StrictlyIncreasing,
            (e, Sign::NonNeg) => e,
        }
    }

    /// Effect of `base * c` with `c >= 1`; `strict` when `c > 1`.
    fn scaled(&self, base: &Expr, strict: bool, u: usize) -> Effect {
        let inner = self.effect(base, u);
        if inner == Effect::Unprovable {
            return Effect::Unprovable;
        }
        match self.sign(base) {
            Sign::Unknown => Effect::Unprovable,
            Sign::Pos if strict => Effect::StrictlyIncreasing,
            _ => inner,
        }
    }
}

/// Refines the declared positivity assumptions until they are inductive:
/// positive initially and kept positive by every transform.
pub fn proven_positive(m: &Model) -> (Vec<bool>, Vec<String>) {
    let mut positive: Vec<bool> = m
        .components
        .iter()
        .map(|c| c.positive && c.init.is_positive())
        .collect();
    let mut notes = Vec::new();
    for c in &m.components {
        if c.positive && !c.init.is_positive() {
            notes.push(format!(
                "positivity of `{}` dropped: initial value {} is not positive",
                c.name, c.init
            ));
        }
    }
    loop {
        let mut changed = false;
        for t in &m.transforms {
            for (&c, e) in &t.assignments {
                if positive[c] && (Prover { positive: &positive }).sign(e) != Sign::Pos {
                    positive[c] = false;
                    changed = true;
                    notes.push(format!(
                        "positivity of `{}` dropped: transform `{}` may not keep it positive",
                        m.components[c].name, t.name
                    ));
                }
            }
        }
        if !changed {
            return (positive, notes);
        }
    }
}

/// Returns the effect of transition transform `transform` on component `u`.
pub fn transform_effect(m: &Model, positive: &[bool], transform: Option<usize>, u: usize) -> Effect {
    match transform.and_then(|t| m.transforms[t].assignments.get(&u)) {
        None => Effect::NonDecreasing,
        Some(e) => Prover { positive }.effect(e, u),
    }
}

/// A path from the initial to the final locality avoiding transitions for
/// which `blocked` holds, as a list of locality names.
pub(crate) fn path_avoiding(agent: &Agent, blocked: impl Fn(usize) -> bool) -> Option<Vec<String>> {
    let fin = agent.final_locality();
    let mut parent: Vec<Option<usize>> = vec![None; agent.localities.len()];
    let mut seen = vec![false; agent.localities.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(l) = stack.pop() {
        if l == fin {
            let mut path = vec![agent.localities[l].clone()];
            let mut cur = l;
            while let Some(p) = parent[cur] {
                path.push(agent.localities[p].clone());
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for (idx, t) in agent.post(l) {
            if !blocked(idx) && !seen[t.to] {
                seen[t.to] = true;
                parent[t.to] = Some(l);
                stack.push(t.to);
            }
        }
    }
    None
}

pub fn acyclicity(m: &Model, allow_missing_x: bool) -> (Vec<AcyclicityViolation>, Vec<String>) {
    let mut violations = Vec::new();
    let (positive, mut notes) = proven_positive(m);
    for a in m.agents.iter().filter(|a| a.is_degenerate()) {
        notes.push(format!(
            "agent `{}` has a single locality; its resets are spurious",
            a.name
        ));
    }
    let xs: Vec<usize> = (0..m.components.len())
        .filter(|&i| m.components[i].x)
        .collect();
    if xs.is_empty() {
        if allow_missing_x {
            notes.push("acyclicity not checked: no X component declared".into());
        } else {
            violations.push(AcyclicityViolation::NoXComponents);
        }
        return (violations, notes);
    }

    // No transform may decrease an X component.
    for t in &m.transforms {
        for &u in &xs {
            if let Some(e) = t.assignments.get(&u) {
                if (Prover {
                    positive: &positive,
                })
                .effect(e, u)
                    == Effect::Unprovable
                {
                    violations.push(AcyclicityViolation::Unprovable {
                        transform: t.name.clone(),
                        component: m.components[u].name.clone(),
                        reason: "unprovable".into(),
                    });
                }
            }
        }
    }

    // Some agent must increase X on every path of one iteration.
    let mut witnesses = Vec::new();
    let mut covered = false;
    for agent in &m.agents {
        let increasing = |idx: usize| {
            let t = &agent.transitions[idx];
            xs.iter().any(|&u| {
                transform_effect(m, &positive, t.transform, u) == Effect::StrictlyIncreasing
            })
        };
        match path_avoiding(agent, increasing) {
            None => {
                covered = true;
                break;
            }
            Some(path) => witnesses.push(AcyclicityViolation::UncoveredPath {
                agent: agent.name.clone(),
                path,
            }),
        }
    }
    if !covered {
        violations.extend(witnesses);
    }
    (violations, notes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;

    #[test]
    fn fixtures_are_mapts() {
        for m in fixtures::all() {
            let report = validate(&m, false);
            assert!(report.is_mapt(), "{report:?}");
        }
    }

    #[test]
    fn lowered_period_breaks_clause_four() {
        let mut m = fixtures::ex1();
        m.agents[0].reset_period = 2;
        let v = strong_liveness(&m);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].clause, 4);
        assert_eq!(v[0].agent, "A1");
        assert_eq!(v[0].locality, "2");
    }

    #[test]
    fn clause_three_and_initial_clauses() {
        let mut m = fixtures::intervals();
        // Entering l2_2 as late as 8 while leaving through [6,7].
        m.agents[1].transitions[0].interval.b = 8;
        let v = strong_liveness(&m);
        assert!(v.iter().any(|x| x.clause == 3 && x.locality == "l2_2"), "{v:?}");

        let mut m = fixtures::intervals();
        m.agents[0].init_clock = 6;
        assert_eq!(strong_liveness(&m)[0].clause, 2);
        m.agents[0].init_locality = 2;
        m.agents[0].init_clock = 11;
        assert_eq!(strong_liveness(&m)[0].clause, 1);
    }

    #[test]
    fn halving_x_is_rejected() {
        let mut m = fixtures::ex1();
        m.components[0].x = true;
        m.components[1].x = false;
        let (v, _) = acyclicity(&m, false);
        assert!(v.contains(&AcyclicityViolation::Unprovable {
            transform: "f3".into(),
            component: "x".into(),
            reason: "unprovable".into()
        }));
    }

    #[test]
    fn identity_only_fails_coverage() {
        let mut m = fixtures::intervals();
        m.agents[0].transitions[1].transform = None;
        let (v, _) = acyclicity(&m, false);
        assert_eq!(v.len(), 2, "{v:?}");
        assert!(v
            .iter()
            .all(|x| matches!(x, AcyclicityViolation::UncoveredPath { .. })));
    }

    #[test]
    fn missing_x_needs_override() {
        let mut m = fixtures::ex1();
        m.components[1].x = false;
        assert_eq!(acyclicity(&m, false).0, vec![AcyclicityViolation::NoXComponents]);
        assert!(acyclicity(&m, true).0.is_empty());
    }

    #[test]
    fn prover_rules() {
        use crate::model::expr::Scope;
        let names = vec!["u".to_string(), "p".to_string(), "w".to_string()];
        let positive = [false, true, false];
        let prover = Prover {
            positive: &positive,
        };
        let effect = |src: &str| {
            let ast = crate::syntax::parse(src).unwrap();
            let e = Scope {
                components: &names,
                agents: None,
            }
            .lower_expr(&ast)
            .unwrap();
            prover.effect(&e, 0)
        };
        assert_eq!(effect("u"), Effect::NonDecreasing);
        assert_eq!(effect("u + 1"), Effect::StrictlyIncreasing);
        assert_eq!(effect("0 + u"), Effect::NonDecreasing);
        assert_eq!(effect("u + p"), Effect::StrictlyIncreasing);
        assert_eq!(effect("u + p * 2"), Effect::StrictlyIncreasing);
        assert_eq!(effect("u + w"), Effect::Unprovable);
        assert_eq!(effect("u - 1"), Effect::Unprovable);
        assert_eq!(effect("u - (-1)"), Effect::StrictlyIncreasing);
        assert_eq!(effect("2 * u"), Effect::Unprovable);
        assert_eq!(effect("2 * (u + p)"), Effect::Unprovable);
        assert_eq!(effect("max(u, w)"), Effect::NonDecreasing);
        assert_eq!(effect("min(u + 1, u + 2)"), Effect::StrictlyIncreasing);
        assert_eq!(effect("min(u + 1, 4)"), Effect::Unprovable);
        assert_eq!(effect("ite(w > 0, u + 1, u)"), Effect::NonDecreasing);
        assert_eq!(effect("5"), Effect::Unprovable);

        let positive = [true, true, false];
        let prover = Prover {
            positive: &positive,
        };
        let ast = crate::syntax::parse("u * 3 / 2").unwrap();
        let e = Scope {
            components: &names,
            agents: None,
        }
        .lower_expr(&ast)
        .unwrap();
        assert_eq!(prover.effect(&e, 0), Effect::Unprovable);
        let ast = crate::syntax::parse("u * 2").unwrap();
        let e = Scope {
            components: &names,
            agents: None,
        }
        .lower_expr(&ast)
        .unwrap();
        assert_eq!(prover.effect(&e, 0), Effect::StrictlyIncreasing);
    }

    #[test]
    fn positivity_is_checked_inductively() {
        let m = fixtures::toy_vehicles();
        let (positive, notes) = proven_positive(&m);
        assert!(positive[m.component_index("speed_a").unwrap()]);
        assert!(notes.is_empty(), "{notes:?}");

        let mut m = fixtures::toy_vehicles();
        let t = m.transform_index("slower_a").unwrap();
        let speed = m.component_index("speed_a").unwrap();
        let ast = crate::syntax::parse("speed_a - 1").unwrap();
        let names = m.component_names();
        let e = crate::model::expr::Scope {
            components: &names,
            agents: None,
        }
        .lower_expr(&ast)
        .unwrap();
        m.transforms[t].assignments.insert(speed, e);
        let (positive, notes) = proven_positive(&m);
        assert!(!positive[speed]);
        assert_eq!(notes.len(), 1);
        // Without positive speed, pos_a + speed_a is no longer provable.
        assert!(!acyclicity(&m, false).0.is_empty());
    }
}
