use thiserror::Error;

use crate::complex::Simplex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),

    #[error("simplex {0} is not in the complex")]
    NotInComplex(Simplex),

    #[error("join of complexes with overlapping vertex labels ({0} shared)")]
    OverlappingJoin(usize),

    #[error("complex is not pure: {0}")]
    NotPure(String),

    #[error("not a closed pseudomanifold: {0}")]
    NotPseudomanifold(String),

    #[error("Pachner move not applicable: {0}")]
    NotApplicable(String),

    #[error("carrier missing or inconsistent: {0}")]
    Carrier(String),

    #[error("no shelling found for {0}")]
    ShellingNotFound(String),

    #[error("ambient link condition violated: {0}")]
    AmbientLink(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("intersection: {0}")]
    Intersection(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("resource cap exceeded: {what} (limit {limit})")]
    ResourceCap { what: String, limit: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Process exit codes used by the command line front end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Invariant = 1,
    Input = 2,
    ResourceCap = 3,
}

impl Error {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Error::ResourceCap { .. } => ExitCode::ResourceCap,
            Error::Json(_) | Error::Io(_) | Error::Input(_) | Error::InvalidSimplex(_) => {
                ExitCode::Input
            }
            _ => ExitCode::Invariant,
        }
    }
}
