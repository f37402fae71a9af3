use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("PD syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("edge {label} occurs {count} times (expected exactly twice)")]
    EdgeMultiplicity { label: u32, count: usize },

    #[error("inconsistent orientation: {0}")]
    Orientation(String),

    #[error("basepoint {0} is not an edge of the diagram")]
    BadBasepoint(u32),

    #[error("expected {expected} crossing orientations, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("not an edge of the cube: {0:#b} -> {1:#b}")]
    NotAnEdge(u32, u32),

    #[error("inconsistent coboundary system")]
    Inconsistent,

    #[error("face {bottom:#b}/{i},{j} is neither commuting nor anticommuting")]
    Unclassifiable { bottom: u32, i: usize, j: usize },

    #[error("diagram has no basepoint")]
    NoBasepoint,

    #[error("burnside consistency failure: {0}")]
    Burnside(String),

    #[error("generator subset is not closed: {0}")]
    NotClosed(String),

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("cancellation precondition failed: {0}")]
    Cancellation(String),

    #[error("move not applicable: {0}")]
    Move(String),

    #[error("movie line {line}: {msg}")]
    Movie { line: usize, msg: String },

    #[error("expected a knot (one component), got {0} components")]
    NotAKnot(usize),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
