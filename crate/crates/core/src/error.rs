use alloc::string::String;

/// Errors raised by the layout engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph is disconnected: node {0} is unreachable from node 0")]
    DisconnectedGraph(usize),
    #[error("layout has {found} rows but the graph has {expected} nodes")]
    LayoutSizeMismatch { expected: usize, found: usize },
    #[error("node {0} has a non-finite coordinate")]
    NonFiniteCoordinate(usize),
    #[error("nodes {0} and {1} coincide")]
    CoincidentNodes(usize, usize),
    #[error("edge ({0}, {1}) has zero length")]
    ZeroLengthEdge(usize, usize),
    #[error("all nodes coincide")]
    DegenerateLayout,
    #[error("k = {k} is out of range for {n} nodes")]
    KOutOfRange { k: usize, n: usize },
    #[error("no separator for crossing edges {0} and {1}")]
    MissingSeparator(usize, usize),
    #[error("gradient became non-finite at iteration {0}")]
    NumericalDivergence(usize),
}
