use thiserror::Error;

use crate::graph::{VertexId, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("invalid graph: {}", describe(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("neighbor oracle error at vertex {vertex}: {reason}")]
    Oracle { vertex: VertexId, reason: String },

    #[error("distance queries on procedural graphs need an explicit cutoff")]
    CutoffRequired,

    #[error("graph has {n} vertices, above the dense limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("operation needs a finite graph")]
    NotFinite,

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EigenNotConverged { sweeps: usize },

    #[error("operator has a negative eigenvalue {0} (expected L >= 0)")]
    NegativeSpectrum(f64),

    #[error("path-sum enumeration exceeded the budget of {0} sequences")]
    EnumerationBudget(u64),

    #[error("series method rejected: t * lambda_max = {0} exceeds 2")]
    SeriesInadmissible(f64),

    #[error("series did not reach tolerance within {0} terms")]
    SeriesNotConverged(usize),

    #[error("eigen method requested without a spectral decomposition")]
    NoDecomposition,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("vertices {0} and {1} are not connected")]
    Disconnected(VertexId, VertexId),

    #[error("value underflow after {collected} of {requested} grid points")]
    Underflow { collected: usize, requested: usize },

    #[error("invalid generator spec `{spec}`: {reason}")]
    GeneratorSpec { spec: String, reason: String },
}

fn describe(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
