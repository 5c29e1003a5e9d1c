use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    synthesize_radiation_data, synthesize_scattering_data, AmplitudeMode, AntennaArray, DipoleSource, FrequencySweep,
    ImagingMode, MeasurementSet, PointScatterer,
};
use crate::geometry::{Facet, Scene, SurfaceId, Vec3};
use crate::imaging::{GridGeometry, ReconstructionConfig};
use crate::propagation::PathEngine;

pub const SCHEMA_VERSION: u32 = 1;

/// Geometry of one surface as written in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Triangle {
        vertices: [Vec3; 3],
    },
    Rectangle {
        center: Vec3,
        u_axis: Vec3,
        v_axis: Vec3,
        width: f64,
        height: f64,
    },
    Mesh {
        triangles: Vec<[Vec3; 3]>,
    },
    InfinitePlane {
        point: Vec3,
        normal: Vec3,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub id: SurfaceId,
    /// Marks a line-of-sight blocker.
    #[serde(default)]
    pub occluder: bool,
    pub shape: ShapeSpec,
}

impl SurfaceSpec {
    pub fn facet(&self) -> Result<Facet> {
        match &self.shape {
            ShapeSpec::Triangle { vertices } => Facet::triangle(self.id, *vertices),
            ShapeSpec::Rectangle {
                center,
                u_axis,
                v_axis,
                width,
                height,
            } => Facet::rectangle(self.id, *center, *u_axis, *v_axis, *width, *height),
            ShapeSpec::Mesh { triangles } => Facet::mesh(self.id, triangles.clone()),
            ShapeSpec::InfinitePlane { point, normal } => Facet::infinite_plane(self.id, *point, *normal),
        }
    }
}

pub fn build_scene(surfaces: &[SurfaceSpec]) -> Result<Scene> {
    let mut finite = Vec::new();
    let mut infinite = Vec::new();
    for s in surfaces {
        let f = s.facet()?;
        if f.is_infinite() {
            infinite.push(f);
        } else {
            finite.push(f);
        }
    }
    let occluders = surfaces.iter().filter(|s| s.occluder).map(|s| s.id);
    Scene::new(finite, infinite, occluders)
}

/// Everything needed to synthesize data and reconstruct: surfaces, either
/// radiating dipoles or point targets, antennas, sweep and image grid.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub surfaces: Vec<SurfaceSpec>,
    pub sources: Vec<DipoleSource>,
    pub targets: Vec<PointScatterer>,
    pub array: AntennaArray,
    pub sweep: FrequencySweep,
    pub grid: GridGeometry,
    /// Reflection order the scenario is meant to be reconstructed with.
    pub max_order: usize,
    scene: Scene,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    name: String,
    surfaces: Vec<SurfaceSpec>,
    #[serde(default)]
    sources: Vec<DipoleSource>,
    #[serde(default)]
    targets: Vec<PointScatterer>,
    array: AntennaArray,
    sweep: FrequencySweep,
    grid: GridGeometry,
    max_order: usize,
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        surfaces: Vec<SurfaceSpec>,
        sources: Vec<DipoleSource>,
        targets: Vec<PointScatterer>,
        array: AntennaArray,
        sweep: FrequencySweep,
        grid: GridGeometry,
        max_order: usize,
    ) -> Result<Self> {
        if sources.is_empty() == targets.is_empty() {
            return Err(Error::InvalidArgument(
                "a scenario has either sources or targets, not both or neither".into(),
            ));
        }
        if !targets.is_empty() && array.tx_positions.is_empty() {
            return Err(Error::InvalidArgument("targets need at least one transmitter".into()));
        }
        if array.rx_positions.is_empty() {
            return Err(Error::EmptyInput("receivers"));
        }
        if (array.copol.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("copol must be a unit vector".into()));
        }
        sweep.validate()?;
        grid.validate()?;
        let scene = build_scene(&surfaces)?;
        for a in array.tx_positions.iter().chain(&array.rx_positions) {
            let on_surface = scene.surfaces().any(|f| {
                f.plane()
                    .is_some_and(|p| p.signed_distance(a).abs() < 1e-9 && f.contains_planar_point(a, 0.0))
            });
            if on_surface {
                return Err(Error::InvalidArgument(format!("antenna at {a:?} lies on a surface")));
            }
        }
        Ok(Self {
            name: name.into(),
            surfaces,
            sources,
            targets,
            array,
            sweep,
            grid,
            max_order,
            scene,
        })
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn mode(&self) -> ImagingMode {
        if self.sources.is_empty() {
            ImagingMode::Scattering
        } else {
            ImagingMode::Radiation
        }
    }

    pub fn copol(&self) -> Vec3 {
        self.array.copol
    }

    /// Image-method reconstruction at the scenario's reflection order.
    pub fn reconstruction_config(&self) -> ReconstructionConfig {
        ReconstructionConfig::new(self.mode(), self.copol(), self.max_order)
    }

    /// Forward data at `max_order` with the given engine and amplitude model.
    pub fn synthesize(&self, engine: &PathEngine, max_order: usize, mode: AmplitudeMode) -> Result<MeasurementSet> {
        match self.mode() {
            ImagingMode::Radiation => synthesize_radiation_data(
                &self.sources,
                &self.array,
                &self.scene,
                &self.sweep,
                engine,
                max_order,
                mode,
            ),
            ImagingMode::Scattering => synthesize_scattering_data(
                &self.targets,
                &self.array,
                &self.scene,
                &self.sweep,
                engine,
                max_order,
                mode,
            ),
        }
    }

    /// Same scenario with a different grid.
    pub fn with_grid(mut self, grid: GridGeometry) -> Result<Self> {
        grid.validate()?;
        self.grid = grid;
        Ok(self)
    }

    /// Canonical pretty JSON; floats are written in shortest round-trip form.
    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            surfaces: self.surfaces.clone(),
            sources: self.sources.clone(),
            targets: self.targets.clone(),
            array: self.array.clone(),
            sweep: self.sweep,
            grid: self.grid,
            max_order: self.max_order,
        };
        let mut s = serde_json::to_string_pretty(&file).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        Self::new(
            file.name,
            file.surfaces,
            file.sources,
            file.targets,
            file.array,
            file.sweep,
            file.grid,
            file.max_order,
        )
    }
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, scenario.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenes::{builtin, BUILTIN_NAMES};

    #[test]
    fn save_load_save_is_byte_identical() {
        let dir = std::env::temp_dir().join(format!("rtbpa-scn-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        for name in BUILTIN_NAMES {
            let s = builtin(name).unwrap().unwrap();
            let p1 = dir.join(format!("{name}.json"));
            save_scenario(&s, &p1).unwrap();
            let loaded = load_scenario(&p1).unwrap();
            assert_eq!(loaded.to_json(), s.to_json());
            assert_eq!(loaded.surfaces, s.surfaces);
            assert_eq!(loaded.array, s.array);
            assert_eq!(loaded.grid, s.grid);
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn awkward_floats_round_trip() {
        let mut s = builtin("hidden_dipole").unwrap().unwrap();
        s.sources[0].position.x = 0.1 + 0.2;
        s.sweep.step = 1.0 / 3.0 * 1e8;
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back.sources[0].position.x.to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(back.sweep.step.to_bits(), s.sweep.step.to_bits());
    }

    #[test]
    fn missing_field_is_named() {
        let s = builtin("three_spheres").unwrap().unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        v.as_object_mut().unwrap().remove("sweep");
        let err = Scenario::from_json(&v.to_string()).unwrap_err();
        assert!(matches!(&err, Error::Parse(m) if m.contains("sweep")), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let s = builtin("three_spheres").unwrap().unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        v["grid"]["colour"] = serde_json::json!("red");
        let err = Scenario::from_json(&v.to_string()).unwrap_err();
        assert!(matches!(&err, Error::Parse(m) if m.contains("colour")), "{err}");
    }

    #[test]
    fn schema_version_checked() {
        let s = builtin("tum_logo").unwrap().unwrap();
        let text = s.to_json().replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(matches!(Scenario::from_json(&text), Err(Error::Parse(_))));
        assert!(matches!(Scenario::from_json("{ nope"), Err(Error::Parse(_))));
    }

    #[test]
    fn sources_xor_targets() {
        let s = builtin("three_spheres").unwrap().unwrap();
        let err = Scenario::new(
            "x",
            s.surfaces.clone(),
            vec![],
            vec![],
            s.array.clone(),
            s.sweep,
            s.grid,
            1,
        );
        assert!(err.is_err());
    }
}
