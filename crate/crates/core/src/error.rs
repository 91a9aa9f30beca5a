use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("grammar file, line {line}: {message}")]
    GrammarSyntax { line: usize, message: String },

    #[error("rank {rank} out of range for a tree with {nodes} nodes")]
    RankOutOfRange { rank: usize, nodes: usize },

    #[error("rotation undefined at rank {rank}")]
    RotationUndefined { rank: usize },

    #[error("trees have different sizes ({left} and {right} nodes)")]
    SizeMismatch { left: usize, right: usize },

    #[error("endpoints are incomparable")]
    Incomparable,

    #[error("size {n} exceeds the configured bound {bound}")]
    BoundExceeded { n: usize, bound: usize },

    #[error("height word too short")]
    WordTooShort,

    #[error("tree is not balanced")]
    NotBalanced,

    #[error("node {rank} has no left child")]
    NoLeftChild { rank: usize },

    #[error("variable {0} has no assignment")]
    Unassigned(String),

    #[error("bud {0} has no rule")]
    MissingRule(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("generation exceeded {limit} bud trees")]
    ExplosionGuard { limit: usize },

    #[error("grammar fails the strictness certificate")]
    NotStrict,

    #[error("imbalance set must contain 0")]
    ZeroNotInSet,

    #[error("word has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("{what} {value} out of range")]
    OutOfRange { what: &'static str, value: i64 },

    #[error("rotation roots do not commute")]
    OrderDependent,

    #[error("{what}: brute force gives {brute}, grammar gives {grammar}")]
    Mismatch {
        what: &'static str,
        brute: String,
        grammar: String,
    },
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn unknown(kind: &'static str, name: impl Into<String>) -> Self {
        Error::Unknown {
            kind,
            name: name.into(),
        }
    }
}
