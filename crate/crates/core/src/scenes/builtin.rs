use super::scenario::{Scenario, ShapeSpec, SurfaceSpec};
use crate::error::{Error, Result};
use crate::fields::{AntennaArray, DipoleSource, FrequencySweep, PointScatterer};
use crate::geometry::{SurfaceId, Vec3};
use crate::imaging::GridGeometry;

pub const SOURCE_HEIGHT: f64 = 0.7;
pub const GROUND_ID: SurfaceId = SurfaceId(0);
pub const PLATE_ID: SurfaceId = SurfaceId(1);
pub const CEILING_ID: SurfaceId = SurfaceId(2);
pub const CEILING_HEIGHT: f64 = 1.4;

/// Rx plane of the logo and hidden-source layouts, in y.
pub const LOGO_RX_Y: f64 = -1.15;
pub const LOGO_PLATE_Y: f64 = -0.5;
pub const SPHERES_RX_Y: f64 = -1.25;
pub const SPHERES_PLATE_Y: f64 = -0.6;

pub const APERTURE_WIDTH: f64 = 1.2;
pub const APERTURE_HEIGHT: f64 = 1.0;
pub const DEFAULT_RX: (usize, usize) = (40, 34);

/// Position of the single dipole of `hidden_dipole`, on a voxel center of
/// the default grid.
pub const HIDDEN_DIPOLE: [f64; 3] = [0.1, 0.04, SOURCE_HEIGHT];

pub const SPHERE_CENTERS: [[f64; 3]; 3] = [[0.0, -0.25, 0.7], [0.2, -0.25, 0.7], [0.4, -0.25, 0.7]];
pub const SPHERES_TX: [f64; 3] = [0.2, 0.4, 0.7];

pub const BUILTIN_NAMES: [&str; 5] = [
    "tum_logo",
    "three_spheres",
    "parallel_plates",
    "hidden_dipole",
    "hidden_dipole_ceiling",
];

/// Built-in scenario by name, at default parameters.
pub fn builtin(name: &str) -> Option<Result<Scenario>> {
    Some(match name {
        "tum_logo" => scenario_tum_logo(DEFAULT_RX.0, DEFAULT_RX.1),
        "three_spheres" => scenario_three_spheres(),
        "parallel_plates" => scenario_parallel_plates(0.6, 1.0),
        "hidden_dipole" => scenario_hidden_dipole(false),
        "hidden_dipole_ceiling" => scenario_hidden_dipole(true),
        _ => return None,
    })
}

pub fn ku_sweep() -> FrequencySweep {
    FrequencySweep {
        f_start: 18e9,
        f_stop: 20e9,
        step: 100e6,
    }
}

fn v(p: [f64; 3]) -> Vec3 {
    Vec3::new(p[0], p[1], p[2])
}

/// `nu × nv` cell-centered samples of a `width × height` rectangle spanned
/// by `u` and `v`, `u` fastest.
pub fn plane_array(center: Vec3, u: Vec3, v: Vec3, width: f64, height: f64, nu: usize, nv: usize) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(nu * nv);
    for j in 0..nv {
        let b = ((j as f64 + 0.5) / nv as f64 - 0.5) * height;
        for i in 0..nu {
            let a = ((i as f64 + 0.5) / nu as f64 - 0.5) * width;
            out.push(center + u * a + v * b);
        }
    }
    out
}

fn ground() -> SurfaceSpec {
    SurfaceSpec {
        id: GROUND_ID,
        occluder: false,
        shape: ShapeSpec::InfinitePlane {
            point: Vec3::zeros(),
            normal: Vec3::z(),
        },
    }
}

fn ceiling() -> SurfaceSpec {
    SurfaceSpec {
        id: CEILING_ID,
        occluder: false,
        shape: ShapeSpec::InfinitePlane {
            point: Vec3::new(0.0, 0.0, CEILING_HEIGHT),
            normal: -Vec3::z(),
        },
    }
}

/// Thin 1.4 m × 0.5 m plate in the plane `y = plate_y`, centered at source
/// height.
fn occluder(center_x: f64, plate_y: f64) -> SurfaceSpec {
    SurfaceSpec {
        id: PLATE_ID,
        occluder: true,
        shape: ShapeSpec::Rectangle {
            center: Vec3::new(center_x, plate_y, SOURCE_HEIGHT),
            u_axis: Vec3::x(),
            v_axis: Vec3::z(),
            width: 1.4,
            height: 0.5,
        },
    }
}

fn rx_plane(center_x: f64, rx_y: f64, nx: usize, nz: usize) -> Vec<Vec3> {
    plane_array(
        Vec3::new(center_x, rx_y, SOURCE_HEIGHT),
        Vec3::x(),
        Vec3::z(),
        APERTURE_WIDTH,
        APERTURE_HEIGHT,
        nx,
        nz,
    )
}

/// `n × n` horizontal grid whose voxel centers lie on the `spacing` lattice
/// through `center`; `center` itself is voxel `(n/2, n/2)`.
pub fn lattice_grid(center: Vec3, spacing: f64, n: usize) -> GridGeometry {
    let half = (n / 2) as f64 * spacing;
    GridGeometry::new(
        center - Vec3::new(half, half, 0.0),
        [Vec3::x(), Vec3::y(), Vec3::z()],
        [spacing; 3],
        [n, n, 1],
    )
    .expect("valid grid")
}

/// Letter strokes of the logo on a 0.05 m raster, as (column, row): 21
/// columns across 1.0 m in x, 6 rows across 0.25 m in y.
#[rustfmt::skip]
const LOGO_CELLS: [(u8, u8); 37] = [
    // T
    (0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (2, 1), (2, 2), (2, 3), (2, 4),
    // U
    (7, 0), (7, 1), (7, 2), (7, 3), (7, 4), (11, 0), (11, 1), (11, 2), (11, 3), (11, 4),
    (8, 5), (9, 5), (10, 5),
    // M
    (15, 0), (15, 1), (15, 2), (15, 3), (15, 4), (15, 5),
    (19, 0), (19, 1), (19, 2), (19, 3), (19, 4), (19, 5),
    (16, 1), (17, 2), (18, 1),
];

pub fn logo_positions() -> Vec<Vec3> {
    LOGO_CELLS
        .iter()
        .map(|&(c, r)| Vec3::new(-0.5 + 0.05 * c as f64, 0.125 - 0.05 * r as f64, SOURCE_HEIGHT))
        .collect()
}

/// 37 x-polarized dipoles spelling T-U-M at 0.7 m over PEC ground, seen
/// through the ground bounce only: a plate blocks every direct path to the
/// vertical receiver plane.
pub fn scenario_tum_logo(n_rx_x: usize, n_rx_y: usize) -> Result<Scenario> {
    if n_rx_x * n_rx_y < 100 {
        return Err(Error::InvalidArgument(format!(
            "receiver grid {n_rx_x}×{n_rx_y} has fewer than 100 elements"
        )));
    }
    let copol = Vec3::x();
    let sources = logo_positions()
        .into_iter()
        .map(|p| DipoleSource::new(p, copol))
        .collect::<Result<Vec<_>>>()?;
    Scenario::new(
        "tum_logo",
        vec![ground(), occluder(0.0, LOGO_PLATE_Y)],
        sources,
        vec![],
        AntennaArray::new(vec![], rx_plane(0.0, LOGO_RX_Y, n_rx_x, n_rx_y), copol)?,
        ku_sweep(),
        lattice_grid(Vec3::new(0.0, 0.0, SOURCE_HEIGHT), 0.01, 128),
        2,
    )
}

/// One dipole of the logo layout. With `ceiling`, a second PEC plane at
/// 1.4 m adds ceiling and ground–ceiling paths, so the receivers see both
/// single-bounce (sign −1) and double-bounce (sign +1) arrivals.
pub fn scenario_hidden_dipole(ceiling_on: bool) -> Result<Scenario> {
    let copol = Vec3::x();
    let mut surfaces = vec![ground(), occluder(0.0, LOGO_PLATE_Y)];
    if ceiling_on {
        surfaces.push(ceiling());
    }
    let name = if ceiling_on {
        "hidden_dipole_ceiling"
    } else {
        "hidden_dipole"
    };
    Scenario::new(
        name,
        surfaces,
        vec![DipoleSource::new(v(HIDDEN_DIPOLE), copol)?],
        vec![],
        AntennaArray::new(vec![], rx_plane(0.0, LOGO_RX_Y, DEFAULT_RX.0, DEFAULT_RX.1), copol)?,
        ku_sweep(),
        lattice_grid(Vec3::new(0.0, 0.0, SOURCE_HEIGHT), 0.01, 128),
        2,
    )
}

/// Three unit point targets in a row along x, lit by one dipole behind
/// them; the receivers see the targets only via the ground.
pub fn scenario_three_spheres() -> Result<Scenario> {
    let copol = Vec3::x();
    let targets = SPHERE_CENTERS.iter().map(|c| PointScatterer::new(v(*c), 1.0)).collect();
    Scenario::new(
        "three_spheres",
        vec![ground(), occluder(0.2, SPHERES_PLATE_Y)],
        vec![],
        targets,
        AntennaArray::new(
            vec![v(SPHERES_TX)],
            rx_plane(0.2, SPHERES_RX_Y, DEFAULT_RX.0, DEFAULT_RX.1),
            copol,
        )?,
        ku_sweep(),
        lattice_grid(Vec3::new(0.2, -0.1, SOURCE_HEIGHT), 0.01, 128),
        2,
    )
}

/// Receiver plane of the parallel-plates layout, in y.
pub const PLATES_RX_Y: f64 = -1.0;

/// A z-polarized dipole centered between two vertical PEC plates
/// (normals ±x) of `plate_size × plate_size`, extending from 0.2 m behind
/// the dipole toward the receiver plane. No ground.
pub fn scenario_parallel_plates(plate_gap: f64, plate_size: f64) -> Result<Scenario> {
    if !(plate_gap > 0.0 && plate_size > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "plate gap and size must be positive, got {plate_gap} and {plate_size}"
        )));
    }
    let copol = Vec3::z();
    let plate = |id: u32, x: f64| SurfaceSpec {
        id: SurfaceId(id),
        occluder: false,
        shape: ShapeSpec::Rectangle {
            center: Vec3::new(x, 0.2 - plate_size / 2.0, SOURCE_HEIGHT),
            u_axis: Vec3::y(),
            v_axis: Vec3::z(),
            width: plate_size,
            height: plate_size,
        },
    };
    let source = Vec3::new(0.0, 0.0, SOURCE_HEIGHT);
    Scenario::new(
        "parallel_plates",
        vec![plate(1, -plate_gap / 2.0), plate(2, plate_gap / 2.0)],
        vec![DipoleSource::new(source, copol)?],
        vec![],
        AntennaArray::new(vec![], rx_plane(0.0, PLATES_RX_Y, DEFAULT_RX.0, DEFAULT_RX.1), copol)?,
        ku_sweep(),
        lattice_grid(source, 0.0025, 128),
        3,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::find_paths_images;

    #[test]
    fn logo_defaults() {
        let s = scenario_tum_logo(40, 34).unwrap();
        assert_eq!(s.sources.len(), 37);
        assert_eq!(s.sweep.count(), 21);
        assert_eq!(s.array.rx_positions.len(), 1360);
        assert!(scenario_tum_logo(9, 11).is_err());
    }

    #[test]
    fn logo_is_hidden_but_reachable() {
        let s = scenario_tum_logo(10, 10).unwrap();
        for src in &s.sources {
            for rx in &s.array.rx_positions {
                assert!(s.scene().occluded(&src.position, rx, &[]));
                let paths = find_paths_images(&src.position, rx, s.scene(), 1).unwrap();
                assert!(paths.iter().any(|p| p.order() == 1), "{src:?} -> {rx:?}");
            }
        }
    }

    #[test]
    fn spheres_layout() {
        let s = scenario_three_spheres().unwrap();
        let xs: Vec<f64> = s.targets.iter().map(|t| t.position.x).collect();
        assert_eq!(xs, vec![0.0, 0.2, 0.4]);
        assert!(s.targets.iter().all(|t| t.reflectivity == Complex64::new(1.0, 0.0)));
        assert_eq!(s.array.tx_positions, vec![v(SPHERES_TX)]);
        for t in &s.targets {
            for rx in &s.array.rx_positions {
                assert!(s.scene().occluded(&t.position, rx, &[]));
            }
        }
    }

    #[test]
    fn plates_central_voxel_has_three_legs() {
        let s = scenario_parallel_plates(0.6, 1.0).unwrap();
        let center = s.sources[0].position;
        let rx = s.array.rx_positions[17 * 40 + 20];
        let paths = find_paths_images(&center, &rx, s.scene(), 1).unwrap();
        assert_eq!(paths.len(), 3);
        assert_eq!(paths.iter().filter(|p| p.is_line_of_sight()).count(), 1);
        assert!(scenario_parallel_plates(0.0, 1.0).is_err());
    }

    #[test]
    fn grid_center_is_a_voxel() {
        for name in BUILTIN_NAMES {
            let s = builtin(name).unwrap().unwrap();
            let g = s.grid;
            let c = g.voxel_center([g.dims[0] / 2, g.dims[1] / 2, 0]);
            let expected = match name {
                "three_spheres" => Vec3::new(0.2, -0.1, SOURCE_HEIGHT),
                _ => Vec3::new(0.0, 0.0, SOURCE_HEIGHT),
            };
            assert!((c - expected).norm() < 1e-12, "{name}");
        }
        let s = scenario_hidden_dipole(false).unwrap();
        let vx = s.grid.nearest_voxel(&s.sources[0].position).unwrap();
        assert!((s.grid.voxel_center(vx) - s.sources[0].position).norm() < 1e-12);
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn builders_are_deterministic() {
        for name in BUILTIN_NAMES {
            let a = builtin(name).unwrap().unwrap().to_json();
            let b = builtin(name).unwrap().unwrap().to_json();
            assert_eq!(a, b);
        }
    }

    use num_complex::Complex64;
}
