use proptest::prelude::*;
use rtbpa_core::geometry::{Facet, Ray, Scene, SurfaceId, Vec3};

fn vec3() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn triangles(max: usize) -> impl Strategy<Value = Vec<[Vec3; 3]>> {
    prop::collection::vec((vec3(), vec3(), vec3()), 1..=max)
        .prop_map(|v| v.into_iter().map(|(a, b, c)| [a, b, c]).collect())
}

fn scene_of(tris: &[[Vec3; 3]]) -> Scene {
    let facets = tris
        .iter()
        .enumerate()
        .filter_map(|(i, t)| Facet::triangle(SurfaceId(i as u32), *t).ok())
        .collect();
    Scene::new(facets, vec![], []).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bvh_matches_brute_force(tris in triangles(200), rays in prop::collection::vec((vec3(), vec3()), 32)) {
        let scene = scene_of(&tris);
        prop_assert!(scene.bvh().validate(&scene.primitive_bounds()));
        for (o, d) in rays {
            prop_assume!(d.norm() > 1e-3);
            let ray = Ray::new(o * 2.0, d.normalize());
            let fast = scene.intersect(&ray);
            let slow = scene.intersect_brute_force(&ray);
            match (fast, slow) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    prop_assert!((a.t - b.t).abs() < 1e-9, "{} vs {}", a.t, b.t);
                    if (a.t - b.t).abs() > 1e-12 {
                        prop_assert_eq!(a.surface_id, b.surface_id);
                    }
                }
                (a, b) => prop_assert!(false, "bvh {:?} brute {:?}", a, b),
            }
        }
    }

    #[test]
    fn occlusion_agrees_with_first_hit(tris in triangles(60), a in vec3(), b in vec3()) {
        let scene = scene_of(&tris);
        let d = b - a;
        prop_assume!(d.norm() > 1e-3);
        let hit = scene.intersect_brute_force(&Ray::new(a, d.normalize()));
        let expected = hit.is_some_and(|h| h.t < d.norm() * (1.0 - 1e-6) && h.t > 1e-6);
        let near_end = hit.is_some_and(|h| (h.t - d.norm()).abs() < 1e-6 || h.t < 1e-6);
        prop_assume!(!near_end);
        prop_assert_eq!(scene.occluded(&a, &b, &[]), expected);
    }
}

#[test]
fn infinite_plane_hits() {
    let ground = Facet::infinite_plane(SurfaceId(0), Vec3::zeros(), Vec3::z()).unwrap();
    let scene = Scene::new(vec![], vec![ground], []).unwrap();
    let hit = scene
        .intersect(&Ray::new(Vec3::new(0.3, 0.1, 2.0), Vec3::new(0.0, 0.6, -0.8)))
        .unwrap();
    assert!((hit.t - 2.5).abs() < 1e-12);
    assert!((hit.point - Vec3::new(0.3, 1.6, 0.0)).norm() < 1e-12);
    assert_eq!(hit.normal, Vec3::z());
    assert!(scene
        .intersect(&Ray::new(Vec3::new(0.0, 0.0, 2.0), Vec3::z()))
        .is_none());
}

#[test]
fn duplicate_ids_rejected() {
    let t = [Vec3::zeros(), Vec3::x(), Vec3::y()];
    let a = Facet::triangle(SurfaceId(3), t).unwrap();
    let b = Facet::triangle(SurfaceId(3), t.map(|v| v + Vec3::z())).unwrap();
    assert!(Scene::new(vec![a, b], vec![], []).is_err());
    assert!(Facet::triangle(SurfaceId(0), [Vec3::zeros(), Vec3::x(), Vec3::x() * 2.0]).is_err());
}
