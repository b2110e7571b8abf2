use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("invalid ordering: {0}")]
    BadOrdering(String),
    #[error("stage/position index out of range: stage {stage}, position {position}, n = {n}")]
    IndexOutOfRange { stage: usize, position: usize, n: usize },
    #[error("search supports at most 64 vertices, got {0}")]
    TooLarge(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric (entry ({row}, {col}))")]
    NotSymmetric { row: usize, col: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error)]
pub enum LssError {
    #[error("ambient dimension must be at least 1")]
    ZeroDimension,
    #[error("coefficient bound must be at least 1")]
    ZeroBound,
    #[error("ordering does not match the graph: {0}")]
    OrderingMismatch(String),
    #[error("node-variable values missing for {0}")]
    MissingValue(String),
    #[error("no strongly successful faithful run after {attempts} attempts")]
    Degenerate { attempts: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GardenError {
    #[error("index {index} outside 1..={d}")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("invalid input slot: {0}")]
    Slot(String),
    #[error("garden type mismatch: {0}")]
    TypeMismatch(String),
    #[error("{what} budget exceeded (limit {limit})")]
    Budget { what: &'static str, limit: u64 },
    #[error("integer coefficient overflow")]
    Overflow,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("DIMACS parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("clause {0} is tautological")]
    Tautology(usize),
    #[error("formula must have at least one atom and one clause")]
    Trivial,
    #[error("invalid approximation mode: {0}")]
    Mode(String),
    #[error("instance too large for exhaustive checking: {0}")]
    Guard(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
