use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("missing variable {0} in assignment")]
    MissingVariable(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("root finding failed: {0}")]
    Root(String),

    #[error("factorization retries exhausted: radius {radius} not below epsilon {epsilon} with r = {r}")]
    RetriesExhausted { radius: f64, epsilon: f64, r: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Construction(_) => "construction",
            Error::Invariant(_) => "invariant",
            Error::MissingVariable(_) => "missing_variable",
            Error::Shape(_) => "shape",
            Error::Root(_) => "root",
            Error::RetriesExhausted { .. } => "retries_exhausted",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
