use thiserror::Error;

/// Errors raised by the geometric primitives, oracles and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("two input points coincide")]
    DuplicatePoint,
    #[error("all three points coincide")]
    AllCoincident,
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("the two sites of a pair coincide")]
    CoincidentSites,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("no candidate pairs to evaluate")]
    EmptyCandidates,
    #[error("could not generate a generic point set after {0} attempts")]
    GenericityFailure(usize),
    #[error("the site set has no unique closest pair")]
    NoUniqueClosestPair,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
