use thiserror::Error;

use crate::geometry::SurfaceId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grazing incidence: |d·n| = {0:e} is below the grazing tolerance")]
    GrazingIncidence(f64),

    #[error("degenerate facet {id}: {reason}")]
    DegenerateFacet { id: SurfaceId, reason: String },

    #[error("duplicate surface id {0}")]
    DuplicateSurfaceId(SurfaceId),

    #[error("occluder id {0} does not name a surface in the scene")]
    UnknownOccluder(SurfaceId),

    #[error("surface {0} has no supporting plane")]
    NonPlanarReflector(SurfaceId),

    #[error("path is cross-polarized: |projection| = {0:e}")]
    CrossPolarized(f64),

    #[error("observation point coincides with the source position")]
    Singular,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("image is identically zero")]
    EmptyImage,

    #[error("main lobe does not fall below half maximum inside the grid")]
    UnresolvedLobe,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scenario file: {0}")]
    Parse(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
