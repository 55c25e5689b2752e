use thiserror::Error;

/// Errors produced by graph construction, boundary-condition validation,
/// enumeration caps, and curve post-processing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported graph size: {0}")]
    UnsupportedGraph(String),

    #[error("invalid spectral request: {0}")]
    Spectral(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("boundary condition invalid: {}", .0.join("; "))]
    BoundaryCondition(Vec<String>),

    #[error("enumeration cap exceeded: {free_sites} free sites > cap {cap} (roughly {estimate:.1e} states)")]
    CapExceeded {
        free_sites: usize,
        cap: usize,
        estimate: f64,
    },

    #[error("invalid height configuration: {0}")]
    InvalidConfig(String),

    #[error("curve rejected: {0}")]
    Curve(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("config file error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
