use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rtbpa_core::geometry::{Facet, Scene, SurfaceId, Vec3};
use rtbpa_core::propagation::{
    find_paths_images, find_paths_sbr, pair_wavefronts, path_hash, trace_sequence, PropagationPath, SbrConfig,
};

/// Ground plus a vertical wall and a tilted plate.
fn room() -> Scene {
    let ground = Facet::infinite_plane(SurfaceId(0), Vec3::zeros(), Vec3::z()).unwrap();
    let wall = Facet::rectangle(SurfaceId(1), Vec3::new(0.8, 0.0, 0.6), Vec3::y(), Vec3::z(), 2.0, 1.2).unwrap();
    let tilt = Vec3::new(0.0, 1.0, 1.0).normalize();
    let plate = Facet::rectangle(SurfaceId(2), Vec3::new(-0.2, 0.9, 0.9), Vec3::x(), tilt, 0.8, 0.6).unwrap();
    Scene::new(vec![wall, plate], vec![ground], []).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(
        rng.random_range(-0.6..0.6),
        rng.random_range(-0.8..0.4),
        rng.random_range(0.2..1.0),
    )
}

fn check_specular(p: &PropagationPath) {
    let pts: Vec<Vec3> = std::iter::once(p.endpoint_a)
        .chain(p.vertices.iter().copied())
        .chain(std::iter::once(p.endpoint_b))
        .collect();
    let length: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    assert!((length - p.total_length).abs() < 1e-9);
    for (i, n) in p.normals.iter().enumerate() {
        let din = (pts[i + 1] - pts[i]).normalize();
        let dout = (pts[i + 2] - pts[i + 1]).normalize();
        let mirrored = din - n * (2.0 * din.dot(n));
        assert!(
            (mirrored - dout).norm() < 1e-9,
            "bounce {i} of {:?}",
            p.interaction_sequence
        );
    }
    assert_eq!(p.hash, path_hash(&p.interaction_sequence));
}

#[test]
fn image_paths_obey_reflection_law() {
    let scene = room();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = 0;
    for _ in 0..200 {
        let (a, b) = (random_point(&mut rng), random_point(&mut rng));
        let paths = find_paths_images(&a, &b, &scene, 3).unwrap();
        for w in paths.windows(2) {
            assert!(w[0].total_length <= w[1].total_length);
        }
        for p in &paths {
            check_specular(p);
            assert!(p.order() <= 3);
            let again = trace_sequence(&a, &b, &scene, &p.interaction_sequence)
                .unwrap()
                .unwrap();
            assert_eq!(again.total_length, p.total_length);
            seen += p.order();
        }
    }
    assert!(seen > 200);
}

#[test]
fn image_paths_are_reciprocal() {
    let scene = room();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let (a, b) = (random_point(&mut rng), random_point(&mut rng));
        let mut fwd: Vec<(Vec<u32>, f64)> = find_paths_images(&a, &b, &scene, 2)
            .unwrap()
            .iter()
            .map(|p| (p.interaction_sequence.iter().map(|s| s.0).collect(), p.total_length))
            .collect();
        let mut back: Vec<(Vec<u32>, f64)> = find_paths_images(&b, &a, &scene, 2)
            .unwrap()
            .iter()
            .map(|p| {
                (
                    p.interaction_sequence.iter().rev().map(|s| s.0).collect(),
                    p.total_length,
                )
            })
            .collect();
        fwd.sort_by(|x, y| x.0.cmp(&y.0));
        back.sort_by(|x, y| x.0.cmp(&y.0));
        assert_eq!(fwd.len(), back.len());
        for (f, r) in fwd.iter().zip(&back) {
            assert_eq!(f.0, r.0);
            assert!((f.1 - r.1).abs() < 1e-9);
        }
    }
}

#[test]
fn sbr_paths_are_image_paths() {
    let scene = room();
    let cfg = SbrConfig {
        ray_count: 20_000,
        max_bounces: 2,
        capture_radius: 0.05,
        rng_seed: 5,
        refine: true,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut found = 0;
    for _ in 0..20 {
        let (a, b) = (random_point(&mut rng), random_point(&mut rng));
        let exact = find_paths_images(&a, &b, &scene, 2).unwrap();
        for p in find_paths_sbr(&a, &b, &scene, &cfg).unwrap() {
            let m = exact
                .iter()
                .find(|e| e.hash == p.hash)
                .expect("sbr path missing from image set");
            assert!((m.total_length - p.total_length).abs() < 1e-6);
            check_specular(&p);
            found += 1;
        }
    }
    assert!(found > 20);
}

#[test]
fn sbr_is_seed_deterministic() {
    let scene = room();
    let cfg = SbrConfig {
        ray_count: 5_000,
        ..SbrConfig::default()
    };
    let (a, b) = (Vec3::new(0.1, -0.2, 0.5), Vec3::new(-0.3, 0.2, 0.8));
    let x = find_paths_sbr(&a, &b, &scene, &cfg).unwrap();
    let y = find_paths_sbr(&a, &b, &scene, &cfg).unwrap();
    assert_eq!(x, y);
}

#[test]
fn wavefront_pairs_carry_the_sign_product() {
    let scene = room();
    let copol = Vec3::x();
    let (p, t, r) = (
        Vec3::new(0.0, 0.0, 0.7),
        Vec3::new(0.2, -1.0, 0.6),
        Vec3::new(-0.3, -1.1, 0.9),
    );
    let tx = find_paths_images(&p, &t, &scene, 2).unwrap();
    let rx = find_paths_images(&p, &r, &scene, 2).unwrap();
    let pairs = pair_wavefronts(&tx, &rx, &copol);
    assert!(!pairs.is_empty());
    for w in &pairs {
        let s = w.tx_leg.pol_sign(&copol).unwrap().value() * w.rx_leg.pol_sign(&copol).unwrap().value();
        assert_eq!(w.half_wave_sign(), s);
        assert!((w.phase_length - w.tx_leg.total_length - w.rx_leg.total_length).abs() < 1e-12);
    }
}
