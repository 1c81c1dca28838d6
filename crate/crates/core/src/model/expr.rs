//! Typed expression trees over valuation components and agent clocks.
//!
//! Transform right-hand sides, `ite` conditions, query terms and sweep
//! indicators all share this tree. Transforms never contain clock leaves;
//! the lowering step rejects them.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::syntax::{Ast, AstKind, BinOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Ge => ord != Ordering::Less,
            CmpOp::Gt => ord == Ordering::Greater,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
        }
    }

    pub fn from_bin(op: BinOp) -> Option<CmpOp> {
        Some(match op {
            BinOp::Lt => CmpOp::Lt,
            BinOp::Le => CmpOp::Le,
            BinOp::Eq => CmpOp::Eq,
            BinOp::Ne => CmpOp::Ne,
            BinOp::Ge => CmpOp::Ge,
            BinOp::Gt => CmpOp::Gt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Var { index: usize, name: String },
    Clock { agent: usize, name: String },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
    Ite(Box<Cond>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cond {
    Bool(bool),
    Cmp(CmpOp, Expr, Expr),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

/// Values visible to an expression during evaluation.
pub trait Env {
    fn var(&self, index: usize) -> &Rational;
    fn clock(&self, agent: usize) -> Option<u64>;
}

impl Env for [Rational] {
    fn var(&self, index: usize) -> &Rational {
        &self[index]
    }

    fn clock(&self, _agent: usize) -> Option<u64> {
        None
    }
}

/// Failure while evaluating; the caller attaches the component name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    DivisionByZero(String),
    Overflow(String),
    NoClock(String),
}

impl EvalError {
    pub fn into_error(self, component: &str) -> Error {
        match self {
            EvalError::DivisionByZero(expr) => Error::DivisionByZero {
                component: component.to_string(),
                expr,
            },
            EvalError::Overflow(msg) => Error::Overflow(format!("{msg} in `{component}`")),
            EvalError::NoClock(name) => {
                Error::Predicate(format!("clock of `{name}` is not available in `{component}`"))
            }
        }
    }
}

fn lift(r: Result<Rational>) -> std::result::Result<Rational, EvalError> {
    r.map_err(|e| EvalError::Overflow(e.to_string()))
}

impl Expr {
    pub fn constant(n: i64) -> Expr {
        Expr::Const(Rational::from_integer(n))
    }

    pub fn eval<E: Env + ?Sized>(&self, env: &E) -> std::result::Result<Rational, EvalError> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::Var { index, .. } => env.var(*index).clone(),
            Expr::Clock { agent, name } => match env.clock(*agent) {
                Some(c) => Rational::from_integer(c as i64),
                None => return Err(EvalError::NoClock(name.clone())),
            },
            Expr::Neg(e) => e.eval(env)?.neg(),
            Expr::Add(l, r) => lift(l.eval(env)?.add(&r.eval(env)?))?,
            Expr::Sub(l, r) => lift(l.eval(env)?.sub(&r.eval(env)?))?,
            Expr::Mul(l, r) => lift(l.eval(env)?.mul(&r.eval(env)?))?,
            Expr::Div(l, r) => {
                let num = l.eval(env)?;
                let den = r.eval(env)?;
                match num.div(&den) {
                    Some(q) => lift(q)?,
                    None => return Err(EvalError::DivisionByZero(self.to_string())),
                }
            }
            Expr::Min(args) => {
                let mut best: Option<Rational> = None;
                for a in args {
                    let v = a.eval(env)?;
                    best = Some(match best {
                        Some(b) if b <= v => b,
                        _ => v,
                    });
                }
                best.expect("min has at least one argument")
            }
            Expr::Max(args) => {
                let mut best: Option<Rational> = None;
                for a in args {
                    let v = a.eval(env)?;
                    best = Some(match best {
                        Some(b) if b >= v => b,
                        _ => v,
                    });
                }
                best.expect("max has at least one argument")
            }
            Expr::Ite(c, a, b) => {
                if c.eval(env)? {
                    a.eval(env)?
                } else {
                    b.eval(env)?
                }
            }
        })
    }

    /// Calls `f` on every component index the expression reads.
    pub fn visit_vars(&self, f: &mut impl FnMut(usize)) {
        match self {
            Expr::Const(_) | Expr::Clock { .. } => {}
            Expr::Var { index, .. } => f(*index),
            Expr::Neg(e) => e.visit_vars(f),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
            Expr::Min(args) | Expr::Max(args) => args.iter().for_each(|a| a.visit_vars(f)),
            Expr::Ite(c, a, b) => {
                c.visit_vars(f);
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }
}

impl Cond {
    pub fn eval<E: Env + ?Sized>(&self, env: &E) -> std::result::Result<bool, EvalError> {
        Ok(match self {
            Cond::Bool(b) => *b,
            Cond::Cmp(op, l, r) => op.holds(l.eval(env)?.cmp(&r.eval(env)?)),
            Cond::Not(c) => !c.eval(env)?,
            Cond::And(l, r) => l.eval(env)? && r.eval(env)?,
            Cond::Or(l, r) => l.eval(env)? || r.eval(env)?,
        })
    }

    fn visit_vars(&self, f: &mut impl FnMut(usize)) {
        match self {
            Cond::Bool(_) => {}
            Cond::Cmp(_, l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
            Cond::Not(c) => c.visit_vars(f),
            Cond::And(l, r) | Cond::Or(l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
        }
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    let text = c.to_string();
    if c.is_negative() || text.contains('/') {
        write!(f, "({text})")
    } else {
        f.write_str(&text)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, name: &str, args: &[Expr]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_const(f, c),
            Expr::Var { name, .. } => f.write_str(name),
            Expr::Clock { name, .. } => write!(f, "clock({name})"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Add(l, r) => write!(f, "({l} + {r})"),
            Expr::Sub(l, r) => write!(f, "({l} - {r})"),
            Expr::Mul(l, r) => write!(f, "({l} * {r})"),
            Expr::Div(l, r) => write!(f, "({l} / {r})"),
            Expr::Min(args) => write_list(f, "min", args),
            Expr::Max(args) => write_list(f, "max", args),
            Expr::Ite(c, a, b) => write!(f, "ite({c}, {a}, {b})"),
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Bool(b) => write!(f, "{b}"),
            Cond::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol()),
            Cond::Not(c) => write!(f, "!({c})"),
            Cond::And(l, r) => write!(f, "({l} && {r})"),
            Cond::Or(l, r) => write!(f, "({l} || {r})"),
        }
    }
}

/// Name resolution used while lowering an [`Ast`].
pub struct Scope<'a> {
    pub components: &'a [String],
    /// Agent names; `None` forbids `clock(..)`.
    pub agents: Option<&'a [String]>,
}

impl Scope<'_> {
    pub fn lower_expr(&self, ast: &Ast) -> Result<Expr> {
        match &ast.kind {
            AstKind::Num(v, _) => Ok(Expr::Const(v.clone())),
            AstKind::Ident(name) => match self.components.iter().position(|c| c == name) {
                Some(index) => Ok(Expr::Var {
                    index,
                    name: name.clone(),
                }),
                None => Err(Error::UnknownReference {
                    kind: "component",
                    name: name.clone(),
                }),
            },
            AstKind::Neg(inner) => match self.lower_expr(inner)? {
                Expr::Const(c) => Ok(Expr::Const(c.neg())),
                e => Ok(Expr::Neg(Box::new(e))),
            },
            AstKind::Bin(op, l, r) => {
                let lhs = self.lower_expr(l)?;
                let rhs = self.lower_expr(r)?;
                Ok(match op {
                    BinOp::Add => Expr::Add(Box::new(lhs), Box::new(rhs)),
                    BinOp::Sub => Expr::Sub(Box::new(lhs), Box::new(rhs)),
                    BinOp::Mul => Expr::Mul(Box::new(lhs), Box::new(rhs)),
                    BinOp::Div => match (&lhs, &rhs) {
                        // Literal fractions such as `1/3` fold into one constant.
                        (Expr::Const(p), Expr::Const(q)) if !q.is_zero() => {
                            Expr::Const(p.div(q).expect("nonzero")?)
                        }
                        _ => Expr::Div(Box::new(lhs), Box::new(rhs)),
                    },
                    _ => return Err(ast.error("expected a numeric expression, found a condition")),
                })
            }
            AstKind::Call(name, args) => match name.as_str() {
                "min" | "max" => {
                    if args.is_empty() {
                        return Err(ast.error(format!("`{name}` needs at least one argument")));
                    }
                    let args = args
                        .iter()
                        .map(|a| self.lower_expr(a))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(if name == "min" {
                        Expr::Min(args)
                    } else {
                        Expr::Max(args)
                    })
                }
                "ite" => {
                    let [c, a, b] = args.as_slice() else {
                        return Err(ast.error("`ite` takes three arguments"));
                    };
                    Ok(Expr::Ite(
                        Box::new(self.lower_cond(c)?),
                        Box::new(self.lower_expr(a)?),
                        Box::new(self.lower_expr(b)?),
                    ))
                }
                "clock" => {
                    let Some(agents) = self.agents else {
                        return Err(ast.error("`clock` is not allowed here"));
                    };
                    let [arg] = args.as_slice() else {
                        return Err(ast.error("`clock` takes one argument"));
                    };
                    let agent_name = arg
                        .as_name()
                        .ok_or_else(|| arg.error("expected an agent name"))?;
                    let agent = agents.iter().position(|a| a == agent_name).ok_or_else(|| {
                        Error::UnknownReference {
                            kind: "agent",
                            name: agent_name.to_string(),
                        }
                    })?;
                    Ok(Expr::Clock {
                        agent,
                        name: agent_name.to_string(),
                    })
                }
                _ => Err(ast.error(format!("unknown function `{name}`"))),
            },
            _ => Err(ast.error("expected a numeric expression")),
        }
    }

    pub fn lower_cond(&self, ast: &Ast) -> Result<Cond> {
        match &ast.kind {
            AstKind::Ident(name) if name == "true" => Ok(Cond::Bool(true)),
            AstKind::Ident(name) if name == "false" => Ok(Cond::Bool(false)),
            AstKind::Not(inner) => Ok(Cond::Not(Box::new(self.lower_cond(inner)?))),
            AstKind::Bin(BinOp::And, l, r) => Ok(Cond::And(
                Box::new(self.lower_cond(l)?),
                Box::new(self.lower_cond(r)?),
            )),
            AstKind::Bin(BinOp::Or, l, r) => Ok(Cond::Or(
                Box::new(self.lower_cond(l)?),
                Box::new(self.lower_cond(r)?),
            )),
            AstKind::Bin(op, l, r) if op.is_comparison() => Ok(Cond::Cmp(
                CmpOp::from_bin(*op).expect("comparison"),
                self.lower_expr(l)?,
                self.lower_expr(r)?,
            )),
            _ => Err(ast.error("expected a condition")),
        }
    }
}
