//! Back-projection reconstruction and image quality metrics.

mod adjoint;
mod backprojection;
mod grid;
mod metrics;

pub use adjoint::{adjoint_pair_check, adjoint_residual, forward_points, inner};
pub use backprojection::{
    legs_from_paths, naive_bpa, naive_bpa_points, rt_bpa, rt_bpa_points, with_workers, Leg, PathTable,
    ReconstructionConfig, VoxelLegs,
};
pub use grid::{GridGeometry, ImageGrid};
pub use metrics::{image_entropy, peak_locations, psf_metrics, Peak, PsfMetrics, SIDELOBE_FLOOR};
