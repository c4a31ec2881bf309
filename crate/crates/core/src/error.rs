use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("vertex ids must be dense 0..{count}, found {found}")]
    VertexId { count: usize, found: usize },
    #[error("duplicate neighbor {neighbor} in rotation of vertex {vertex}")]
    DuplicateNeighbor { vertex: VertexId, neighbor: VertexId },
    #[error("self loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("asymmetric adjacency: {from} lists {to} but not vice versa")]
    AsymmetricAdjacency { from: VertexId, to: VertexId },
    #[error("missing corner designation")]
    MissingCorners,
    #[error("corner vertices must be distinct")]
    CornersNotDistinct,
    #[error("rotation system is not planar-consistent: V - E + F = {0}")]
    NotPlanar(i64),
    #[error("vertices {0:?} are not distinct vertices on the exterior face")]
    NotOnExterior(Vec<VertexId>),
    #[error("graph is not proper triangular: {0}")]
    NotProperTriangular(String),
    #[error("invalid regular edge labeling: {0}")]
    InvalidRel(String),
    #[error("edge ({0}, {1}) is not an interior edge of the graph")]
    UnknownEdge(VertexId, VertexId),
    #[error("layout does not represent the graph: {0}")]
    BadLayout(String),
    #[error("labeling is not slant")]
    NotSlant,
    #[error("area assignment must be positive for every vertex: {0}")]
    BadAreas(String),
    #[error("cartogram solver did not converge after {iterations} iterations (max relative error {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("gadget {gadget} is not suitable for the cut: {reason}")]
    Unsuitable { gadget: String, reason: String },
    #[error("interior vertex count {count} exceeds the cap {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("conflicting labels on edge ({0}, {1})")]
    LabelConflict(VertexId, VertexId),
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),
    #[error("pocket boundary does not match either auxiliary-graph case: {0}")]
    BadPocket(String),
    #[error("recursion depth {0} exceeded the pocket bound")]
    DepthExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
