//! Geometrical-optics path finding between image-domain points and antennas.

mod images;
mod path;
mod polarization;
mod sbr;
mod wavefront;

use serde::{Deserialize, Serialize};

pub use images::{find_paths_images, trace_sequence, ImageTracer, MAX_IMAGE_ORDER};
pub use path::{combined_hash, path_hash, PathHash, PropagationPath, Sequence, Vertices};
pub use polarization::{
    leg_polarization, pec_reflect, transport_polarization, LegPolarization, PolSign, CROSS_POL_THRESHOLD,
};
pub use sbr::{find_paths_sbr, find_paths_sbr_multi, launch_seed, SbrConfig};
pub use wavefront::{pair_wavefronts, WavefrontPair};

use crate::error::Result;
use crate::geometry::{Scene, Vec3};

/// Which path finder backs a synthesis or reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PathEngine {
    Images,
    Sbr(SbrConfig),
}

impl PathEngine {
    /// A ready-to-query finder for `scene` up to `max_order` reflections.
    /// For SBR, `max_order` overrides `SbrConfig::max_bounces`.
    pub fn prepare<'a>(&self, scene: &'a Scene, max_order: usize) -> Result<PathFinder<'a>> {
        Ok(match self {
            PathEngine::Images => PathFinder::Images(ImageTracer::new(scene, max_order)?),
            PathEngine::Sbr(cfg) => {
                let cfg = SbrConfig {
                    max_bounces: max_order,
                    ..*cfg
                };
                cfg.validate()?;
                PathFinder::Sbr { scene, cfg }
            }
        })
    }
}

pub enum PathFinder<'a> {
    Images(ImageTracer<'a>),
    Sbr { scene: &'a Scene, cfg: SbrConfig },
}

impl PathFinder<'_> {
    /// Paths from `point` to each antenna, one list per antenna.
    pub fn paths_to_all(&self, point: &Vec3, antennas: &[Vec3]) -> Result<Vec<Vec<PropagationPath>>> {
        match self {
            PathFinder::Images(tracer) => Ok(tracer.paths_to_all(point, antennas)),
            PathFinder::Sbr { scene, cfg } => find_paths_sbr_multi(point, antennas, scene, cfg),
        }
    }
}
