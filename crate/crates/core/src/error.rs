use thiserror::Error;

/// Failures surfaced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point ({x}, {y}) lies outside the fluid domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("solid mesh rejected: {0}")]
    InvalidMesh(String),

    #[error("singular matrix: no acceptable pivot in column {pivot}")]
    Singular { pivot: usize },

    #[error("energy blow-up at step {step}: E = {energy:e} exceeds {limit:e}")]
    Unstable { step: usize, energy: f64, limit: f64 },

    #[error("meshes are not nested: {0}")]
    NotNested(String),

    #[error("error ratio is not positive (coarse {coarse:e}, fine {fine:e})")]
    NonPositiveErrors { coarse: f64, fine: f64 },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
