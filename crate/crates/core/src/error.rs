use thiserror::Error;

use crate::cover::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid cover: {}", format_violations(.0))]
    InvalidCover(Vec<Violation>),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("element system is singular (smallest singular value ratio {0:e})")]
    Unisolvence(f64),

    /// Two samples welded to the same mesh vertex disagree.
    #[error("weld mismatch of {discrepancy:e} at {key}")]
    Weld { key: String, discrepancy: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
