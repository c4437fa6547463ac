use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("the trivial word has no maximal root")]
    EmptyWord,
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown generator `{name}` at line {line}, column {column}")]
    UnknownGenerator {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("relator {index} reduces to the trivial word")]
    TrivialRelator { index: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("witness is not a homomorphism: relator {relator} does not evaluate to the identity")]
    NotAHomomorphism { relator: usize },
    #[error("{what} exceeded the cap of {cap}")]
    BudgetExceeded { what: &'static str, cap: u64 },
    #[error("no witness found ({})", if *.exhausted { "search space exhausted" } else { "search budget hit" })]
    NotFound { exhausted: bool },
    #[error("coset table is not regular: root of relator {relator} has cycle lengths {lengths:?}")]
    RegularityViolation { relator: usize, lengths: Vec<usize> },
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("empty witness list")]
    EmptyList,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
