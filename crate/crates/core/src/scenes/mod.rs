//! Built-in scenarios and the scenario file format.

mod builtin;
mod scenario;

pub use builtin::*;
pub use scenario::{build_scene, load_scenario, save_scenario, Scenario, ShapeSpec, SurfaceSpec, SCHEMA_VERSION};
