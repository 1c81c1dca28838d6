use thiserror::Error;

/// Location inside a source text, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {span}: {message}")]
    Parse { span: Span, message: String },

    #[error("unknown {kind} `{name}`")]
    UnknownReference { kind: &'static str, name: String },

    #[error("malformed model: {0}")]
    Malformed(String),

    #[error("malformed state: {0}")]
    MalformedState(String),

    #[error("division by zero in component `{component}` while evaluating `{expr}`")]
    DivisionByZero { component: String, expr: String },

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("event {0} is not enabled")]
    NotEnabled(String),

    #[error("exploration budget of {0} states exceeded")]
    BudgetExceeded(usize),

    #[error("predicate error: {0}")]
    Predicate(String),

    #[error("heuristic `{heuristic}` needs component `{component}`")]
    MissingComponent { heuristic: String, component: String },

    #[error("model is not a MAPT: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            span: Span { line, column },
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
