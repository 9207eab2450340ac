use thiserror::Error;

use crate::spectral::Eigenpair;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("parallel edge between `{0}` and `{1}`")]
    ParallelEdge(String, String),
    #[error("vertex `{id}` has non-positive measure {mu}")]
    NonPositiveMeasure { id: String, mu: f64 },
    #[error("edge `{u}`-`{v}` has non-positive weight {w}")]
    NonPositiveWeight { u: String, v: String, w: f64 },
    #[error("the Dirichlet domain is empty")]
    EmptyDomain,
    #[error("no edge leaves the Dirichlet domain")]
    NoBoundary,
    #[error("the Dirichlet domain is not connected")]
    DisconnectedDomain,
    #[error("vertex subset is not contained in the domain")]
    SubsetNotInOmega,
    #[error("invalid exponent p = {0}")]
    InvalidP(f64),
    #[error("function has {found} values but the domain has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("function vanishes identically on the domain")]
    ZeroFunction,
    #[error("function is negative at vertex `{0}`")]
    NegativeValues(String),
    #[error("domain has {size} vertices, above the enumeration limit {limit}")]
    DomainTooLarge { size: usize, limit: usize },
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error(
        "solver did not converge at p = {}: residual {:.3e} after {} iterations",
        .0.p, .0.residual, .0.iterations
    )]
    NoConvergence(Box<Eigenpair>),
    #[error("sweep stopped at p = {p}: {source}")]
    SweepFailed {
        p: f64,
        completed: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("sweep has not converged")]
    NotConverged,
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("schedule must contain at least 2 steps, got {0}")]
    InvalidSteps(usize),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("argument {x} is outside (0, 1]")]
    OutOfDomain { x: f64 },
    #[error("root is not bracketed: f({left}) = {f_left}, f({right}) = {f_right}")]
    BracketFailure {
        left: f64,
        f_left: f64,
        right: f64,
        f_right: f64,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
