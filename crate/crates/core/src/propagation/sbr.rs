//! Shooting and bouncing rays: stochastic path discovery from a launch point.
//!
//! Rays leave the launch point with directions uniform on the sphere and
//! bounce specularly. A ray segment passing within the capture radius of an
//! antenna registers a candidate path keyed by its interaction hash; the
//! closest pass per hash wins. With `refine` on, each candidate whose
//! surfaces are all planar is replaced by the exact image-method chain for
//! the same sequence.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};

use super::images::{sort_paths, trace_sequence};
use super::path::{PathHash, PropagationPath, Sequence, Vertices};
use crate::error::{Error, Result};
use crate::geometry::{reflect_direction, Aabb, Ray, Scene, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbrConfig {
    /// Rays launched per launch point.
    pub ray_count: usize,
    pub max_bounces: usize,
    /// Capture sphere radius around each antenna, meters.
    pub capture_radius: f64,
    pub rng_seed: u64,
    /// Snap captured sequences to their exact image-method geometry.
    pub refine: bool,
}

impl Default for SbrConfig {
    fn default() -> Self {
        Self {
            ray_count: 100_000,
            max_bounces: 2,
            capture_radius: 0.05,
            rng_seed: 0,
            refine: true,
        }
    }
}

impl SbrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ray_count == 0 {
            return Err(Error::InvalidArgument("ray_count must be ≥ 1".into()));
        }
        if !(self.capture_radius > 0.0 && self.capture_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "capture_radius must be positive, got {}",
                self.capture_radius
            )));
        }
        Ok(())
    }
}

/// Per-launch RNG seed: the configured seed mixed with the launch point's bit
/// pattern, so results do not depend on scheduling order.
pub fn launch_seed(rng_seed: u64, point: &Vec3) -> u64 {
    let mut h = rng_seed ^ 0x243F_6A88_85A3_08D3;
    for c in point.iter() {
        h = (h ^ c.to_bits()).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        h ^= h >> 29;
    }
    h
}

#[derive(Debug, Clone)]
struct Capture {
    miss: f64,
    vertices: Vertices,
    normals: Vertices,
    sequence: Sequence,
}

/// SBR paths from `point` to a single `antenna`.
pub fn find_paths_sbr(point: &Vec3, antenna: &Vec3, scene: &Scene, cfg: &SbrConfig) -> Result<Vec<PropagationPath>> {
    Ok(find_paths_sbr_multi(point, std::slice::from_ref(antenna), scene, cfg)?
        .pop()
        .expect("one antenna in, one list out"))
}

/// One launch from `point`, capturing at every antenna. Returns one sorted
/// path list per antenna.
pub fn find_paths_sbr_multi(
    point: &Vec3,
    antennas: &[Vec3],
    scene: &Scene,
    cfg: &SbrConfig,
) -> Result<Vec<Vec<PropagationPath>>> {
    cfg.validate()?;
    let r = cfg.capture_radius;
    let r2 = r * r;
    let mut capture_box = Aabb::from_points(antennas.iter());
    capture_box.min.add_scalar_mut(-r);
    capture_box.max.add_scalar_mut(r);

    let mut found: Vec<BTreeMap<PathHash, Capture>> = vec![BTreeMap::new(); antennas.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(launch_seed(cfg.rng_seed, point));

    for _ in 0..cfg.ray_count {
        let [x, y, z]: [f64; 3] = UnitSphere.sample(&mut rng);
        let mut ray = Ray::new(*point, Vec3::new(x, y, z));
        let mut vertices = Vertices::new();
        let mut normals = Vertices::new();
        let mut sequence = Sequence::new();
        let mut bounce = 0usize;
        loop {
            let hit = scene.intersect(&ray);
            let seg_len = hit.map_or(f64::INFINITY, |h| h.t);
            let inv = ray.direction.map(|c| 1.0 / c);
            if !antennas.is_empty() && capture_box.hit(&ray.origin, &inv, 0.0, seg_len) {
                let key = super::path_hash(&sequence);
                for (j, a) in antennas.iter().enumerate() {
                    let w = a - ray.origin;
                    let s = w.dot(&ray.direction);
                    if s <= 0.0 || s >= seg_len {
                        continue;
                    }
                    let d2 = w.norm_squared() - s * s;
                    if d2 > r2 {
                        continue;
                    }
                    let miss = d2.max(0.0).sqrt();
                    let entry = found[j].entry(key);
                    match entry {
                        std::collections::btree_map::Entry::Vacant(v) => {
                            v.insert(Capture {
                                miss,
                                vertices: vertices.clone(),
                                normals: normals.clone(),
                                sequence: sequence.clone(),
                            });
                        }
                        std::collections::btree_map::Entry::Occupied(mut o) => {
                            if miss < o.get().miss {
                                o.insert(Capture {
                                    miss,
                                    vertices: vertices.clone(),
                                    normals: normals.clone(),
                                    sequence: sequence.clone(),
                                });
                            }
                        }
                    }
                }
            }
            let Some(hit) = hit else { break };
            if bounce >= cfg.max_bounces {
                break;
            }
            let Ok(dir) = reflect_direction(&ray.direction, &hit.normal) else {
                break;
            };
            vertices.push(hit.point);
            normals.push(hit.normal);
            sequence.push(hit.surface_id);
            ray = Ray::new(hit.point, dir);
            bounce += 1;
        }
    }

    antennas
        .iter()
        .zip(found)
        .map(|(antenna, captures)| {
            let mut paths = Vec::with_capacity(captures.len());
            for c in captures.into_values() {
                let planar = c
                    .sequence
                    .iter()
                    .all(|id| scene.surface(*id).is_some_and(|f| f.plane().is_some()));
                if cfg.refine && planar {
                    if let Some(p) = trace_sequence(point, antenna, scene, &c.sequence)? {
                        paths.push(p);
                    }
                } else {
                    paths.push(PropagationPath::from_chain(
                        *point, *antenna, c.vertices, c.normals, c.sequence,
                    ));
                }
            }
            sort_paths(&mut paths);
            Ok(paths)
        })
        .collect()
}
