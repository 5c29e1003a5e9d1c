//! Shared fixtures for the criterion benches.

use rtbpa_core::fields::{AmplitudeMode, MeasurementSet};
use rtbpa_core::geometry::{Facet, Ray, Scene, SurfaceId, Vec3};
use rtbpa_core::propagation::PathEngine;
use rtbpa_core::scenes::{lattice_grid, scenario_hidden_dipole, Scenario, SOURCE_HEIGHT};

/// Hidden-dipole scenario on an `n × n` grid and its phase-only data.
pub fn hidden_dipole(n: usize) -> (Scenario, MeasurementSet) {
    let sc = scenario_hidden_dipole(false)
        .and_then(|s| s.with_grid(lattice_grid(Vec3::new(0.0, 0.0, SOURCE_HEIGHT), 0.01, n)))
        .expect("built-in scenario");
    let data = sc
        .synthesize(&PathEngine::Images, sc.max_order, AmplitudeMode::PhaseOnly)
        .expect("synthesis");
    (sc, data)
}

/// Deterministic soup of `n` small triangles in the unit cube and rays through it.
pub fn triangle_soup(n: usize, rays: usize) -> (Scene, Vec<Ray>) {
    // a fixed LCG keeps the fixture independent of any RNG crate version
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = move || {
        state = state
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut point = || Vec3::new(next(), next(), next());
    let facets = (0..n)
        .filter_map(|i| {
            let a = point();
            let b = a + (point() - Vec3::repeat(0.5)) * 0.2;
            let c = a + (point() - Vec3::repeat(0.5)) * 0.2;
            Facet::triangle(SurfaceId(i as u32), [a, b, c]).ok()
        })
        .collect();
    let scene = Scene::new(facets, vec![], []).expect("unique ids");
    let rays = (0..rays)
        .map(|_| {
            let o = point() * 3.0 - Vec3::repeat(1.0);
            let d = (point() - o).normalize();
            Ray::new(o, d)
        })
        .collect();
    (scene, rays)
}
