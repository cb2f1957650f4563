use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("signal has length {actual}, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("signal contains a non-finite value at vertex {0}")]
    NonFinite(usize),

    #[error("square root of negative value {value} at vertex {vertex}")]
    NegativeSqrt { vertex: usize, value: f64 },

    #[error("vertex map is not a graph map: edge ({0}, {1}) is not preserved")]
    NotAGraphMap(usize, usize),

    #[error("map is not a local isomorphism")]
    NotLocalIsomorphism,

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("voltage on base edge ({0}, {1}) is not an automorphism of the fiber")]
    NotAnAutomorphism(usize, usize),

    #[error("voltages on ({0}, {1}) and ({1}, {0}) are not mutually inverse")]
    InconsistentInverse(usize, usize),

    #[error("({0}, {1}) is not an edge of the base graph")]
    NotABaseEdge(usize, usize),

    #[error("set cannot be trivialized: voltage on edge ({0}, {1}) conflicts with the spanning tree")]
    NonTrivializable(usize, usize),

    #[error("cover set {0} does not induce a connected subgraph")]
    DisconnectedSet(usize),

    #[error("not a cover: {uncovered_vertices} uncovered vertices, {uncovered_edges} uncovered edges")]
    NotACover {
        uncovered_vertices: usize,
        uncovered_edges: usize,
    },

    #[error("invalid partition of unity: {0}")]
    InvalidPartition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symmetric eigensolver did not converge")]
    EigenFailure,

    #[error("dictionary is not a tight frame with bound 1 (bounds {lower}, {upper})")]
    NotTight { lower: f64, upper: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
