use thiserror::Error;

/// Errors raised by the geometry constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("infeasible input: {0}")]
    InfeasibleInput(&'static str),
    #[error("invalid box dimensions {0:?}: sides must be positive and finite")]
    InvalidDims([f64; 3]),
    #[error("invalid orientation: {0}")]
    InvalidOrientation(&'static str),
    #[error("invalid direction: {0}")]
    InvalidDirection(&'static str),
    #[error("shadow has {vertices} hull vertices; direction is too close to a face-parallel one")]
    AmbiguousClassification { vertices: usize },
    #[error("shadow is not a hexagon")]
    NotHexagon,
    #[error("vertex {0} is not an endpoint of a side along the shortest box edge")]
    VertexNotCornerCandidate(usize),
    #[error("direction is parallel to a face of the box")]
    FaceParallelDirection,
    #[error("construction failed: {0}")]
    ConstructionFailed(&'static str),
    #[error("cannot move the rectangle into the open interior (no slack)")]
    CannotHarden,
    #[error("rectangle does not fit strictly inside the shadow")]
    DoesNotFit,
    #[error("cross-section plane is too steep (alpha = {0})")]
    SteepPlane(f64),
    #[error("parallelogram is not a cross-section of the given tube")]
    NotACrossSection,
    #[error("vertical fiber through the shadow point has zero length")]
    LiftDegenerate,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
