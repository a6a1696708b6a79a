use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid bit character {0:?} (expected '0' or '1')")]
    BadBit(char),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("block length must be an odd integer >= 3, got {0}")]
    InvalidBlockLength(usize),
    #[error("modulus {modulus} rejected: {why}")]
    BadModulus { modulus: String, why: &'static str },
    #[error("inverse of zero")]
    ZeroInverse,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is rank deficient (rank {rank}, need {needed})")]
    RankDeficient { rank: usize, needed: usize },
    #[error("entry ({row}, {col}) is not in GF(2)")]
    NotBinary { row: usize, col: usize },
}

/// First violated assumption found while validating a multicast network.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("duplicate node name {0:?}")]
    DuplicateNode(String),
    #[error("edge ids must be exactly 1..={expected}; found id {found}")]
    EdgeIds { expected: usize, found: usize },
    #[error("no receivers")]
    NoReceivers,
    #[error("source {0:?} is also listed as a receiver")]
    SourceIsReceiver(String),
    #[error("source {0:?} has incoming edges")]
    SourceHasInput(String),
    #[error("source {0:?} has no outgoing edges")]
    SourceHasNoOutput(String),
    #[error("network contains a directed cycle")]
    Cycle,
    #[error("edge e{edge} leads from the source directly into receiver {receiver:?}")]
    DirectSourceEdge { edge: usize, receiver: String },
    #[error("receiver {receiver:?} has {in_degree} incoming edges, source has {omega}")]
    DegreeMismatch {
        receiver: String,
        in_degree: usize,
        omega: usize,
    },
    #[error("max-flow from source to {receiver:?} is {flow}, below {omega}")]
    InsufficientFlow {
        receiver: String,
        flow: usize,
        omega: usize,
    },
    #[error("path set for {receiver:?} is invalid: {why}")]
    BadPathSet { receiver: String, why: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("block length mismatch: code has L={code}, context has L={context}")]
    BlockLength { code: usize, context: usize },
    #[error("kernel on (e{d}, e{e}) but the edges are not an adjacent pair")]
    NotAdjacent { d: usize, e: usize },
    #[error("kernel on (e{d}, e{e}) has weight {weight} above delta {delta}")]
    WeightAboveDelta {
        d: usize,
        e: usize,
        weight: usize,
        delta: usize,
    },
    #[error("kernel on (e{d}, e{e}) has degree {degree} >= L")]
    DegreeTooLarge { d: usize, e: usize, degree: usize },
    #[error("solution set is empty")]
    EmptySolutionSet,
    #[error("solution set is not closed under doubling mod L ({0} maps outside)")]
    NotDoublingClosed(usize),
    #[error("index {0} is not in the solution set of the code")]
    NotASolution(usize),
    #[error("index {0} out of range for the block length")]
    IndexOutOfRange(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("candidate pool has {size} polynomials, above the cap {cap}")]
    PoolTooLarge { size: u128, cap: u128 },
    #[error("delta must lie in 1..=L-1, got {0}")]
    BadDelta(usize),
    #[error(
        "no candidate kernel for (e{input}, e{edge}) avoids the forbidden sets {forbidden:?}"
    )]
    SelectionExhausted {
        edge: usize,
        input: usize,
        forbidden: Vec<Vec<String>>,
    },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad bit-string in {field}: {source}")]
    Bits {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
}
