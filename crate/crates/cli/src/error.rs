use thiserror::Error;

use rtbpa_core::Error as CoreError;

/// Failures surfaced to the shell; each class has its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unknown reference: {0}")]
    Unknown(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Shape(_) => 3,
            CliError::Unknown(_) => 4,
            CliError::Numeric(_) => 5,
            CliError::Io(_) => 1,
        }
    }

    /// Read failures: a missing file is an unknown reference, anything else
    /// a bad input.
    pub fn reading(path: &std::path::Path, e: std::io::Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        match e.kind() {
            std::io::ErrorKind::NotFound => CliError::Unknown(msg),
            std::io::ErrorKind::UnexpectedEof | std::io::ErrorKind::InvalidData => CliError::Parse(msg),
            _ => CliError::Io(msg),
        }
    }

    pub fn writing(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Parse(_)
            | CoreError::Io(_)
            | CoreError::InvalidArgument(_)
            | CoreError::EmptyInput(_)
            | CoreError::DuplicateSurfaceId(_)
            | CoreError::UnknownOccluder(_)
            | CoreError::NonPlanarReflector(_)
            | CoreError::DegenerateFacet { .. } => CliError::Parse(msg),
            CoreError::ShapeMismatch(_) => CliError::Shape(msg),
            CoreError::GrazingIncidence(_)
            | CoreError::CrossPolarized(_)
            | CoreError::Singular
            | CoreError::EmptyImage
            | CoreError::UnresolvedLobe => CliError::Numeric(msg),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
