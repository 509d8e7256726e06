use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial order {0} outside supported range 1..=16")]
    OrderOutOfRange(usize),
    #[error("spring relaxation on element {element} did not converge: residual {residual:e} after {iterations} iterations")]
    SpringNonConvergence {
        element: usize,
        residual: f64,
        iterations: usize,
    },
    #[error("element {element} has non-positive surface Jacobian {jacobian:e}")]
    DegenerateElement { element: usize, jacobian: f64 },
    #[error("edge {edge} of element {element} does not match its neighbour (mismatch {mismatch:e})")]
    NonConformingEdge {
        element: usize,
        edge: usize,
        mismatch: f64,
    },
    #[error("spherical frame requested at |z| = {z} (element {element}), too close to a pole")]
    PoleProximity { element: usize, z: f64 },
    #[error("non-finite state at t = {time}")]
    NonFiniteState { time: f64 },
    #[error("non-positive depth at t = {time}")]
    PositivityLoss { time: f64 },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
