use thiserror::Error;

/// Errors raised by the workbench. Budget exhaustion is never an error; it is
/// reported as a verdict by the chase drivers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("signature error: {0}")]
    Signature(String),

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("unknown constant `{0}`")]
    UnknownConstant(String),

    #[error("predicate `{predicate}` has arity {expected}, got {found} arguments")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },

    #[error("malformed query: {0}")]
    Query(String),

    #[error("malformed dependency `{tgd}`: {reason}")]
    Tgd { tgd: String, reason: String },

    #[error("trigger for `{0}` is not active")]
    InactiveTrigger(String),

    #[error("formula is already colored: `{0}`")]
    AlreadyColored(String),

    #[error("formula is not colored: `{0}`")]
    NotColored(String),

    #[error("invalid s-pider parameters: {0}")]
    Spider(String),

    #[error("structural violation: {0}")]
    StructuralViolation(String),

    #[error("s-warm error: {0}")]
    Swarm(String),

    #[error("rewriting is not active: {0}")]
    InactiveRewrite(String),

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid Thue system: {0}")]
    Thue(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
