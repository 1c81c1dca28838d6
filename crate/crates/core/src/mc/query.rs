//! Query forms and their rewriting to the four base searches.

use std::fmt;

use super::predicate::Pred;
use crate::error::Result;
use crate::model::Model;
use crate::syntax::{self, Ast, AstKind, BinOp, Temporal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    EF(Pred),
    EG(Pred),
    AF(Pred),
    AG(Pred),
    /// `EF (p && EF q)`
    EFEF(Pred, Pred),
    /// `EF (p && EG q)`
    EFEG(Pred, Pred),
    /// `p --> q`
    LeadsTo(Pred, Pred),
}

/// One of the searches implemented directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    EF(Pred),
    EG(Pred),
    EFEF(Pred, Pred),
    EFEG(Pred, Pred),
}

/// A base search whose answer is negated when `negated` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub base: Base,
    pub negated: bool,
}

impl Query {
    pub fn parse(m: &Model, src: &str) -> Result<Query> {
        let ast = syntax::parse(src)?;
        match &ast.kind {
            AstKind::LeadsTo(p, q) => Ok(Query::LeadsTo(Pred::lower(m, p)?, Pred::lower(m, q)?)),
            AstKind::Temporal(op, inner) => {
                if *op == Temporal::EF {
                    if let Some(nested) = nested(m, inner)? {
                        return Ok(nested);
                    }
                }
                let p = Pred::lower(m, inner)?;
                Ok(match op {
                    Temporal::EF => Query::EF(p),
                    Temporal::EG => Query::EG(p),
                    Temporal::AF => Query::AF(p),
                    Temporal::AG => Query::AG(p),
                })
            }
            _ => Err(ast.error("a query starts with EF, EG, AF or AG, or has the form `p --> q`")),
        }
    }

    pub fn plan(&self) -> Plan {
        let (base, negated) = match self.clone() {
            Query::EF(p) => (Base::EF(p), false),
            Query::EG(p) => (Base::EG(p), false),
            Query::AF(p) => (Base::EG(p.not()), true),
            Query::AG(p) => (Base::EF(p.not()), true),
            Query::EFEF(p, q) => (Base::EFEF(p, q), false),
            Query::EFEG(p, q) => (Base::EFEG(p, q), false),
            Query::LeadsTo(p, q) => (Base::EFEG(p, q.not()), true),
        };
        Plan { base, negated }
    }
}

/// Recognises `p && EF q` and `p && EG q` under an outer `EF`.
fn nested(m: &Model, inner: &Ast) -> Result<Option<Query>> {
    let AstKind::Bin(BinOp::And, p, rhs) = &inner.kind else {
        return Ok(None);
    };
    let AstKind::Temporal(op, q) = &rhs.kind else {
        return Ok(None);
    };
    let p = Pred::lower(m, p)?;
    let q = Pred::lower(m, q)?;
    match op {
        Temporal::EF => Ok(Some(Query::EFEF(p, q))),
        Temporal::EG => Ok(Some(Query::EFEG(p, q))),
        _ => Err(rhs.error("only EF and EG may be nested under EF")),
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::EF(p) => write!(f, "EF {p}"),
            Query::EG(p) => write!(f, "EG {p}"),
            Query::AF(p) => write!(f, "AF {p}"),
            Query::AG(p) => write!(f, "AG {p}"),
            Query::EFEF(p, q) => write!(f, "EF ({p} && EF {q})"),
            Query::EFEG(p, q) => write!(f, "EF ({p} && EG {q})"),
            Query::LeadsTo(p, q) => write!(f, "{p} --> {q}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::fixtures;

    #[test]
    fn parses_all_forms() {
        let m = fixtures::ex1();
        let q = |s: &str| Query::parse(&m, s).unwrap();
        assert!(matches!(q("EF x > 1"), Query::EF(_)));
        assert!(matches!(q("EG x > 0"), Query::EG(_)));
        assert!(matches!(q("AF y >= 1"), Query::AF(_)));
        assert!(matches!(q("AG true"), Query::AG(_)));
        assert!(matches!(q("EF (x = 3.6 && EF x = 7.2)"), Query::EFEF(..)));
        assert!(matches!(q("EF (x > 1 && EG y < 2)"), Query::EFEG(..)));
        assert!(matches!(q("at(A1, 2) --> at(A2, 4)"), Query::LeadsTo(..)));
        // Nesting without the conjunction is an ordinary predicate error.
        assert!(matches!(Query::parse(&m, "EF EF x > 1"), Err(Error::Parse { .. })));
        assert!(matches!(Query::parse(&m, "x > 1"), Err(Error::Parse { .. })));
        assert!(Query::parse(&m, "EF (x > 1 && AG y < 2)").is_err());
    }

    #[test]
    fn rewrites_to_base_searches() {
        let m = fixtures::ex1();
        let plan = Query::parse(&m, "AG x > 0").unwrap().plan();
        assert!(plan.negated);
        assert_eq!(plan.base, Base::EF(Pred::parse(&m, "!(x > 0)").unwrap()));
        let plan = Query::parse(&m, "x > 1 --> y > 1").unwrap().plan();
        assert!(plan.negated);
        assert!(matches!(plan.base, Base::EFEG(_, Pred::Not(_))));
        let plan = Query::parse(&m, "AF final").unwrap().plan();
        assert_eq!(plan.base, Base::EG(Pred::Not(Box::new(Pred::Final))));
    }
}
