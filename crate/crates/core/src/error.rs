use thiserror::Error;

use crate::ribbon;
use crate::triangulation;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("edge `{edge}` is not incident to vertex `{vertex}`")]
    EdgeNotAtVertex { edge: String, vertex: String },

    #[error("vertex `{vertex}` has valency {valency}, expected 3")]
    NotTrivalent { vertex: String, valency: usize },

    #[error("edge `{edge}` is ambiguous at vertex `{vertex}` (loop)")]
    LoopAtVertex { edge: String, vertex: String },

    #[error("word is not consecutive: edge #{index} `{edge}` does not leave vertex `{vertex}`")]
    NonConsecutive {
        index: usize,
        edge: String,
        vertex: String,
    },

    #[error("endpoint mismatch: `{left}` vs `{right}`")]
    EndpointMismatch { left: String, right: String },

    #[error("walk is not closed: starts at `{start}`, ends at `{end}`")]
    NotClosed { start: String, end: String },

    #[error("closed walk is contractible")]
    Contractible,

    #[error("`{0}` is not a valid walk endpoint (must be a dual-graph vertex other than a self-folded triangle)")]
    InvalidEndpoint(String),

    #[error("`{0}` is not a basepoint (boundary-segment vertex)")]
    NotABasepoint(String),

    #[error("walk is not in standard form (backtrack at position {0})")]
    NotStandard(usize),

    #[error("kink is not a current kink of the walk")]
    NotAKink,

    #[error("class is an order-two element; the kink-free section is undefined there")]
    OrderTwoClass,

    #[error("loop is not of order two")]
    NotOrderTwo,

    #[error("normalization did not terminate: {0}")]
    Diverged(String),

    #[error("key lemma hypotheses not met: {0}")]
    KeyLemmaHypothesis(String),

    #[error("invalid ribbon graph: {}", join(.0))]
    InvalidGraph(Vec<ribbon::Diagnostic>),

    #[error("invalid triangulation: {}", join(.0))]
    InvalidTriangulation(Vec<triangulation::Diagnostic>),

    #[error("not flippable: {0}")]
    NotFlippable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
