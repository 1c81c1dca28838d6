//! Lexer and parser for the small infix language shared by transform
//! expressions, state predicates, indicators and queries.
//!
//! The parser produces an untyped [`Ast`]; the model and the checker lower
//! it into their own typed trees and reject constructs they do not accept.

use crate::error::{Error, Result, Span};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational, String),
    Ident(String),
    Str(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    And,
    Or,
    Not,
    LeadsTo,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, text) => format!("number `{text}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::And => "&&",
            Tok::Or => "||",
            Tok::Not => "!",
            Tok::LeadsTo => "-->",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    And,
    Or,
}

impl BinOp {
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Le | BinOp::Eq | BinOp::Ne | BinOp::Ge | BinOp::Gt
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Ge => ">=",
            BinOp::Gt => ">",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Temporal {
    EF,
    EG,
    AF,
    AG,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AstKind {
    Num(Rational, String),
    Ident(String),
    Str(String),
    Call(String, Vec<Ast>),
    Neg(Box<Ast>),
    Not(Box<Ast>),
    Bin(BinOp, Box<Ast>, Box<Ast>),
    Temporal(Temporal, Box<Ast>),
    LeadsTo(Box<Ast>, Box<Ast>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ast {
    pub kind: AstKind,
    pub span: Span,
}

impl Ast {
    /// Name-like payload (identifier, string or number source text).
    pub fn as_name(&self) -> Option<&str> {
        match &self.kind {
            AstKind::Ident(s) | AstKind::Str(s) => Some(s),
            AstKind::Num(_, text) => Some(text),
            _ => None,
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            span: self.span,
            message: message.into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            src,
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Span)>> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let span = Span {
                line: self.line,
                column: self.column,
            };
            let Some(c) = self.peek() else {
                out.push((Tok::Eof, span));
                return Ok(out);
            };
            let tok = if c.is_ascii_digit() || c == '.' {
                let start = self.offset();
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
                    self.bump();
                }
                let text = &self.src[start..self.offset()];
                let value = text
                    .parse::<Rational>()
                    .map_err(|_| Error::parse(span.line, span.column, format!("bad number `{text}`")))?;
                Tok::Num(value, text.to_string())
            } else if c.is_alphabetic() || c == '_' {
                let start = self.offset();
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_' || c == '\'') {
                    self.bump();
                }
                Tok::Ident(self.src[start..self.offset()].to_string())
            } else if c == '"' {
                self.bump();
                let start = self.offset();
                loop {
                    match self.peek() {
                        Some('"') => break,
                        Some(_) => {
                            self.bump();
                        }
                        None => {
                            return Err(Error::parse(span.line, span.column, "unterminated string"))
                        }
                    }
                }
                let text = self.src[start..self.offset()].to_string();
                self.bump();
                Tok::Str(text)
            } else {
                self.bump();
                let next = self.peek();
                match (c, next) {
                    ('(', _) => Tok::LParen,
                    (')', _) => Tok::RParen,
                    (',', _) => Tok::Comma,
                    ('+', _) => Tok::Plus,
                    ('-', Some('-')) => {
                        self.bump();
                        if self.peek() == Some('>') {
                            self.bump();
                            Tok::LeadsTo
                        } else {
                            return Err(Error::parse(span.line, span.column, "expected `-->`"));
                        }
                    }
                    ('-', _) => Tok::Minus,
                    ('*', _) => Tok::Star,
                    ('/', _) => Tok::Slash,
                    ('<', Some('=')) => {
                        self.bump();
                        Tok::Le
                    }
                    ('<', _) => Tok::Lt,
                    ('>', Some('=')) => {
                        self.bump();
                        Tok::Ge
                    }
                    ('>', _) => Tok::Gt,
                    ('=', Some('=')) => {
                        self.bump();
                        Tok::Eq
                    }
                    ('=', _) => Tok::Eq,
                    ('!', Some('=')) => {
                        self.bump();
                        Tok::Ne
                    }
                    ('!', _) => Tok::Not,
                    ('&', Some('&')) => {
                        self.bump();
                        Tok::And
                    }
                    ('|', Some('|')) => {
                        self.bump();
                        Tok::Or
                    }
                    _ => {
                        return Err(Error::parse(
                            span.line,
                            span.column,
                            format!("unexpected character `{c}`"),
                        ))
                    }
                }
            };
            out.push((tok, span));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            let span = self.span();
            Err(Error::parse(
                span.line,
                span.column,
                format!("expected `{}`, found {}", want.symbol(), self.peek().describe()),
            ))
        }
    }

    fn node(kind: AstKind, span: Span) -> Ast {
        Ast { kind, span }
    }

    fn bin(op: BinOp, lhs: Ast, rhs: Ast) -> Ast {
        let span = lhs.span;
        Self::node(AstKind::Bin(op, Box::new(lhs), Box::new(rhs)), span)
    }

    fn leads_to(&mut self) -> Result<Ast> {
        let lhs = self.or()?;
        if *self.peek() == Tok::LeadsTo {
            self.next();
            let rhs = self.or()?;
            let span = lhs.span;
            return Ok(Self::node(AstKind::LeadsTo(Box::new(lhs), Box::new(rhs)), span));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Ast> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.next();
            let rhs = self.and()?;
            lhs = Self::bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Ast> {
        let mut lhs = self.not()?;
        while *self.peek() == Tok::And {
            self.next();
            let rhs = self.not()?;
            lhs = Self::bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn temporal_keyword(&self) -> Option<Temporal> {
        match self.peek() {
            Tok::Ident(s) => match s.as_str() {
                "EF" => Some(Temporal::EF),
                "EG" => Some(Temporal::EG),
                "AF" => Some(Temporal::AF),
                "AG" => Some(Temporal::AG),
                _ => None,
            },
            _ => None,
        }
    }

    fn not(&mut self) -> Result<Ast> {
        let span = self.span();
        if *self.peek() == Tok::Not {
            self.next();
            let inner = self.not()?;
            return Ok(Self::node(AstKind::Not(Box::new(inner)), span));
        }
        if let Some(op) = self.temporal_keyword() {
            self.next();
            // A temporal operator scopes over everything to its right.
            let inner = self.or()?;
            return Ok(Self::node(AstKind::Temporal(op, Box::new(inner)), span));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Ast> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Ge => BinOp::Ge,
            Tok::Gt => BinOp::Gt,
            _ => return Ok(lhs),
        };
        self.next();
        let rhs = self.additive()?;
        Ok(Self::bin(op, lhs, rhs))
    }

    fn additive(&mut self) -> Result<Ast> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.multiplicative()?;
            lhs = Self::bin(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Self::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        let span = self.span();
        if *self.peek() == Tok::Minus {
            self.next();
            let inner = self.unary()?;
            return Ok(Self::node(AstKind::Neg(Box::new(inner)), span));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ast> {
        let (tok, span) = self.next();
        match tok {
            Tok::Num(v, text) => Ok(Self::node(AstKind::Num(v, text), span)),
            Tok::Str(s) => Ok(Self::node(AstKind::Str(s), span)),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.next();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.leads_to()?);
                            if *self.peek() == Tok::Comma {
                                self.next();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Self::node(AstKind::Call(name, args), span))
                } else {
                    Ok(Self::node(AstKind::Ident(name), span))
                }
            }
            Tok::LParen => {
                let inner = self.leads_to()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(Error::parse(
                span.line,
                span.column,
                format!("unexpected {}", other.describe()),
            )),
        }
    }
}

/// Parses a complete expression, predicate or query.
pub fn parse(src: &str) -> Result<Ast> {
    let toks = Lexer::new(src).tokens()?;
    let mut parser = Parser { toks, pos: 0 };
    let ast = parser.leads_to()?;
    if *parser.peek() != Tok::Eof {
        let span = parser.span();
        return Err(Error::parse(
            span.line,
            span.column,
            format!("unexpected {} after expression", parser.peek().describe()),
        ));
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let ast = parse("x + 2 * y < 3 && !z = 1").unwrap();
        let AstKind::Bin(BinOp::And, lhs, rhs) = ast.kind else {
            panic!("expected conjunction");
        };
        assert!(matches!(lhs.kind, AstKind::Bin(BinOp::Lt, _, _)));
        assert!(matches!(rhs.kind, AstKind::Not(_)));
    }

    #[test]
    fn nested_temporal() {
        let ast = parse("EF (x = 3.6 && EF x = 7.2)").unwrap();
        let AstKind::Temporal(Temporal::EF, inner) = ast.kind else {
            panic!()
        };
        let AstKind::Bin(BinOp::And, _, rhs) = inner.kind else {
            panic!()
        };
        assert!(matches!(rhs.kind, AstKind::Temporal(Temporal::EF, _)));
    }

    #[test]
    fn leads_to() {
        let ast = parse("at(A1, 2) --> y >= 1").unwrap();
        assert!(matches!(ast.kind, AstKind::LeadsTo(_, _)));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("x +\n  * 2").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                span: Span { line: 2, column: 3 },
                message: "unexpected `*`".to_string()
            }
        );
        assert!(parse("(x").is_err());
        assert!(parse("x y").is_err());
        assert!(parse("x # 1").is_err());
    }
}
