//! Atomic state predicates.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::expr::{CmpOp, Env, EvalError, Expr, Scope};
use crate::model::Model;
use crate::rational::Rational;
use crate::semantics::{State, System};
use crate::syntax::{self, Ast, AstKind, BinOp};

/// Evaluation environment over a state: values and clocks.
pub struct StateEnv<'a>(pub &'a State);

impl Env for StateEnv<'_> {
    fn var(&self, index: usize) -> &Rational {
        self.0.valuation.get(index)
    }

    fn clock(&self, agent: usize) -> Option<u64> {
        self.0.clocks.get(agent).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pred {
    Bool(bool),
    At { agent: usize, locality: usize, text: String },
    /// No successor within the exploration bound.
    Final,
    Cmp(CmpOp, Expr, Expr),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

fn eval_error(e: EvalError) -> Error {
    match e {
        EvalError::DivisionByZero(expr) => Error::Predicate(format!("division by zero in `{expr}`")),
        EvalError::Overflow(msg) => Error::Predicate(msg),
        EvalError::NoClock(name) => Error::Predicate(format!("no clock for `{name}`")),
    }
}

impl Pred {
    pub fn parse(m: &Model, src: &str) -> Result<Pred> {
        Pred::lower(m, &syntax::parse(src)?)
    }

    pub fn lower(m: &Model, ast: &Ast) -> Result<Pred> {
        let components = m.component_names();
        let agents = m.agent_names();
        let scope = Scope {
            components: &components,
            agents: Some(&agents),
        };
        lower(m, &scope, ast)
    }

    pub fn not(self) -> Pred {
        match self {
            Pred::Not(inner) => *inner,
            Pred::Bool(b) => Pred::Bool(!b),
            p => Pred::Not(Box::new(p)),
        }
    }

    pub fn and(self, other: Pred) -> Pred {
        Pred::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Pred) -> Pred {
        Pred::Or(Box::new(self), Box::new(other))
    }

    pub fn uses_final(&self) -> bool {
        match self {
            Pred::Final => true,
            Pred::Not(p) => p.uses_final(),
            Pred::And(p, q) | Pred::Or(p, q) => p.uses_final() || q.uses_final(),
            _ => false,
        }
    }

    pub fn eval(&self, sys: &System<'_>, s: &State) -> Result<bool> {
        Ok(match self {
            Pred::Bool(b) => *b,
            Pred::At { agent, locality, .. } => s.localities[*agent] == *locality,
            Pred::Final => sys.is_final(s)?,
            Pred::Cmp(op, l, r) => {
                let env = StateEnv(s);
                let l = l.eval(&env).map_err(eval_error)?;
                let r = r.eval(&env).map_err(eval_error)?;
                op.holds(l.cmp(&r))
            }
            Pred::Not(p) => !p.eval(sys, s)?,
            Pred::And(p, q) => p.eval(sys, s)? && q.eval(sys, s)?,
            Pred::Or(p, q) => p.eval(sys, s)? || q.eval(sys, s)?,
        })
    }
}

fn lower(m: &Model, scope: &Scope<'_>, ast: &Ast) -> Result<Pred> {
    match &ast.kind {
        AstKind::Ident(name) => match name.as_str() {
            "true" => Ok(Pred::Bool(true)),
            "false" => Ok(Pred::Bool(false)),
            "final" => Ok(Pred::Final),
            _ => Err(ast.error(format!("`{name}` is not a condition"))),
        },
        AstKind::Call(name, args) if name == "at" => {
            let [agent, locality] = args.as_slice() else {
                return Err(ast.error("`at` takes an agent and a locality"));
            };
            let agent_name = agent
                .as_name()
                .ok_or_else(|| agent.error("expected an agent name"))?;
            let loc_name = locality
                .as_name()
                .ok_or_else(|| locality.error("expected a locality name"))?;
            let a = m
                .agent_index(agent_name)
                .ok_or_else(|| Error::UnknownReference {
                    kind: "agent",
                    name: agent_name.to_string(),
                })?;
            let l = m.agents[a]
                .locality_index(loc_name)
                .ok_or_else(|| Error::UnknownReference {
                    kind: "locality",
                    name: format!("{agent_name}.{loc_name}"),
                })?;
            Ok(Pred::At {
                agent: a,
                locality: l,
                text: format!("at({agent_name}, {loc_name})"),
            })
        }
        AstKind::Not(inner) => Ok(Pred::Not(Box::new(lower(m, scope, inner)?))),
        AstKind::Bin(BinOp::And, l, r) => Ok(lower(m, scope, l)?.and(lower(m, scope, r)?)),
        AstKind::Bin(BinOp::Or, l, r) => Ok(lower(m, scope, l)?.or(lower(m, scope, r)?)),
        AstKind::Bin(op, l, r) if op.is_comparison() => Ok(Pred::Cmp(
            CmpOp::from_bin(*op).expect("comparison"),
            scope.lower_expr(l)?,
            scope.lower_expr(r)?,
        )),
        AstKind::Temporal(..) | AstKind::LeadsTo(..) => {
            Err(ast.error("temporal operators are only allowed at the top of a query"))
        }
        _ => Err(ast.error("expected a condition")),
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Bool(b) => write!(f, "{b}"),
            Pred::At { text, .. } => f.write_str(text),
            Pred::Final => f.write_str("final"),
            Pred::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol()),
            Pred::Not(p) => write!(f, "!({p})"),
            Pred::And(p, q) => write!(f, "({p} && {q})"),
            Pred::Or(p, q) => write!(f, "({p} || {q})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;
    use crate::semantics::{Bound, Semantics};

    #[test]
    fn evaluates_on_initial_state() {
        let m = fixtures::ex1();
        let sys = System::new(&m, Semantics::Original, Bound::none());
        let s = sys.initial();
        let holds = |src: &str| Pred::parse(&m, src).unwrap().eval(&sys, &s).unwrap();
        assert!(holds("x = 0.5 && y == 0"));
        assert!(holds("at(A1, 1) && !at(A2, 4)"));
        assert!(holds("clock(A1) <= 0 || false"));
        assert!(!holds("final"));
        assert!(holds("2 * x >= 1"));
    }

    #[test]
    fn final_respects_bound() {
        let m = fixtures::ex1();
        let sys = System::new(&m, Semantics::Original, Bound::on(&m, "y", 0.into()).unwrap());
        let p = Pred::parse(&m, "final").unwrap();
        assert!(p.eval(&sys, &sys.initial()).unwrap());
    }

    #[test]
    fn errors() {
        let m = fixtures::ex1();
        assert!(matches!(Pred::parse(&m, "z > 1"), Err(Error::UnknownReference { .. })));
        assert!(matches!(Pred::parse(&m, "at(A1, 9)"), Err(Error::UnknownReference { .. })));
        assert!(matches!(Pred::parse(&m, "x + 1"), Err(Error::Parse { .. })));
        assert!(matches!(Pred::parse(&m, "EF x > 1"), Err(Error::Parse { .. })));
        let sys = System::new(&m, Semantics::Original, Bound::none());
        let p = Pred::parse(&m, "x / y > 1").unwrap();
        assert!(matches!(p.eval(&sys, &sys.initial()), Err(Error::Predicate(_))));
    }
}
