use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("axis direction must be a unit vector (norm {0})")]
    InvalidAxis(f64),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("chain needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("vertices {0} and {1} coincide")]
    CoincidentVertices(usize, usize),

    #[error("edge index {index} out of range for chain with {vertices} vertices")]
    EdgeOutOfRange { index: usize, vertices: usize },

    #[error("vertex index {index} out of range for chain with {vertices} vertices")]
    VertexOutOfRange { index: usize, vertices: usize },

    #[error("edge {0} is degenerate")]
    DegenerateEdge(usize),

    #[error("allowed overlap ({0}, {1}) does not name two distinct segments")]
    BadOverlap(usize, usize),

    #[error("dihedral rotation changed edge lengths or vertex angles by {0:e}")]
    RigidityViolated(f64),

    #[error("value {0} exceeds the supported magnitude bound {1}")]
    ValueTooLarge(i64, i64),

    #[error("instance has an empty set")]
    EmptySet,

    #[error("requested size {requested} is smaller than the largest set ({largest})")]
    SizeTooSmall { requested: usize, largest: usize },

    #[error("n must be at least 1")]
    ZeroSize,

    #[error("hinge span {span} outside (0, {arms}]")]
    SpanOutOfRange { span: f64, arms: f64 },

    #[error("target for hinge {hinge} unreachable: needs span {span}, arms allow {arms}")]
    Unreachable { hinge: usize, span: f64, arms: f64 },

    #[error("chain beyond hinge {0} is not coplanar")]
    NotCoplanar(usize),

    #[error("hinge {hinge} fold step {step} collided (moving segment {moving}, static segment {fixed})")]
    FoldCollision {
        hinge: usize,
        step: usize,
        moving: usize,
        fixed: usize,
    },

    #[error("construction is not simple: segments {0} and {1} touch")]
    NotSimple(usize, usize),

    #[error("construction certificate failed: {0}")]
    Certificate(String),

    #[error("collision witness does not map to a tooth (segments {0}, {1})")]
    UnmappedWitness(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
