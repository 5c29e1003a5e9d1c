//! Exact specular paths off planar reflectors by the mirror-image method.

use smallvec::SmallVec;

use super::path::{PropagationPath, Sequence, Vertices};
use crate::error::{Error, Result};
use crate::geometry::{Facet, Plane, Scene, SurfaceId, Vec3, SELF_INTERSECTION_EPS};

/// Highest reflection order the image enumerator accepts.
pub const MAX_IMAGE_ORDER: usize = 5;

/// Slack when testing whether a specular point lies on a finite facet.
const EXTENT_TOL: f64 = 1e-9;

struct Reflector<'a> {
    facet: &'a Facet,
    plane: Plane,
}

fn reflectors(scene: &Scene) -> Result<Vec<Reflector<'_>>> {
    scene
        .surfaces()
        .map(|facet| {
            let plane = *facet.plane().ok_or(Error::NonPlanarReflector(facet.id()))?;
            Ok(Reflector { facet, plane })
        })
        .collect()
}

/// All specular paths from `point` to `antenna` with at most `max_order`
/// reflections, line of sight included when unobstructed. Sorted by length,
/// then hash.
pub fn find_paths_images(
    point: &Vec3,
    antenna: &Vec3,
    scene: &Scene,
    max_order: usize,
) -> Result<Vec<PropagationPath>> {
    Ok(ImageTracer::new(scene, max_order)?.paths(point, antenna))
}

/// Image-method enumerator bound to one scene and order, reusable across
/// many (point, antenna) queries. The interaction sequences are fixed by the
/// scene, so they are listed once; the mirror images of a point are shared
/// by every antenna queried from it.
pub struct ImageTracer<'a> {
    scene: &'a Scene,
    reflectors: Vec<Reflector<'a>>,
    max_order: usize,
    /// Every sequence without immediate repeats, depth first. Each entry
    /// lists the sequence-tree nodes from the first bounce to itself.
    nodes: Vec<SmallVec<[usize; 8]>>,
    /// Reflector of each node's last bounce.
    node_reflector: Vec<usize>,
}

impl<'a> ImageTracer<'a> {
    pub fn new(scene: &'a Scene, max_order: usize) -> Result<Self> {
        if max_order > MAX_IMAGE_ORDER {
            return Err(Error::InvalidArgument(format!(
                "image-method order {max_order} exceeds {MAX_IMAGE_ORDER}"
            )));
        }
        let reflectors = reflectors(scene)?;
        let mut tracer = Self {
            scene,
            reflectors,
            max_order,
            nodes: Vec::new(),
            node_reflector: Vec::new(),
        };
        let mut stack = SmallVec::new();
        tracer.list_sequences(&mut stack);
        Ok(tracer)
    }

    fn list_sequences(&mut self, chain: &mut SmallVec<[usize; 8]>) {
        if chain.len() >= self.max_order {
            return;
        }
        for r in 0..self.reflectors.len() {
            if chain.last().is_some_and(|&node| self.node_reflector[node] == r) {
                continue;
            }
            let node = self.nodes.len();
            chain.push(node);
            self.nodes.push(chain.clone());
            self.node_reflector.push(r);
            self.list_sequences(chain);
            chain.pop();
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Mirror image of `point` for every sequence node.
    fn images(&self, point: &Vec3) -> Vec<Vec3> {
        let mut images = Vec::with_capacity(self.nodes.len());
        for (node, chain) in self.nodes.iter().enumerate() {
            let parent = if chain.len() > 1 {
                images[chain[chain.len() - 2]]
            } else {
                *point
            };
            images.push(self.reflectors[self.node_reflector[node]].plane.mirror_point(&parent));
        }
        images
    }

    fn paths_from_images(&self, point: &Vec3, images: &[Vec3], antenna: &Vec3) -> Vec<PropagationPath> {
        let mut out = Vec::new();
        if !self.scene.occluded(point, antenna, &[]) {
            out.push(PropagationPath::line_of_sight(*point, *antenna));
        }
        for chain in &self.nodes {
            let planes: SmallVec<[&Reflector<'_>; 8]> = chain
                .iter()
                .map(|&n| &self.reflectors[self.node_reflector[n]])
                .collect();
            let imgs: SmallVec<[Vec3; 8]> = std::iter::once(*point)
                .chain(chain.iter().map(|&n| images[n]))
                .collect();
            if let Some(path) = unfold(point, antenna, self.scene, &planes, &imgs) {
                out.push(path);
            }
        }
        sort_paths(&mut out);
        out
    }

    pub fn paths(&self, point: &Vec3, antenna: &Vec3) -> Vec<PropagationPath> {
        self.paths_from_images(point, &self.images(point), antenna)
    }

    /// One sorted path list per antenna.
    pub fn paths_to_all(&self, point: &Vec3, antennas: &[Vec3]) -> Vec<Vec<PropagationPath>> {
        let images = self.images(point);
        antennas
            .iter()
            .map(|a| self.paths_from_images(point, &images, a))
            .collect()
    }
}

pub(crate) fn sort_paths(paths: &mut [PropagationPath]) {
    paths.sort_by(|a, b| a.total_length.total_cmp(&b.total_length).then(a.hash.cmp(&b.hash)));
}

/// Exact path for one interaction sequence, or `None` if that sequence has no
/// valid specular chain (point off a facet, wrong side, or occluded).
pub fn trace_sequence(
    point: &Vec3,
    antenna: &Vec3,
    scene: &Scene,
    sequence: &[SurfaceId],
) -> Result<Option<PropagationPath>> {
    if sequence.is_empty() {
        return Ok((!scene.occluded(point, antenna, &[])).then(|| PropagationPath::line_of_sight(*point, *antenna)));
    }
    if sequence.windows(2).any(|w| w[0] == w[1]) {
        return Ok(None);
    }
    let mut chain: SmallVec<[Reflector<'_>; 8]> = SmallVec::new();
    for id in sequence {
        let facet = scene
            .surface(*id)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown surface {id}")))?;
        let plane = *facet.plane().ok_or(Error::NonPlanarReflector(*id))?;
        chain.push(Reflector { facet, plane });
    }
    let mut images: SmallVec<[Vec3; 8]> = SmallVec::new();
    images.push(*point);
    for r in &chain {
        let next = r.plane.mirror_point(images.last().expect("non-empty"));
        images.push(next);
    }
    let planes: SmallVec<[&Reflector<'_>; 8]> = chain.iter().collect();
    Ok(unfold(point, antenna, scene, &planes, &images))
}

/// `images[0]` is the point, `images[i + 1]` its mirror through `chain[0..=i]`.
fn unfold(
    point: &Vec3,
    antenna: &Vec3,
    scene: &Scene,
    chain: &[&Reflector<'_>],
    images: &[Vec3],
) -> Option<PropagationPath> {
    let n = chain.len();
    let mut vertices: Vertices = smallvec::smallvec![Vec3::zeros(); n];
    let mut target = *antenna;
    for i in (0..n).rev() {
        let plane = &chain[i].plane;
        let image = images[i + 1];
        let d_target = plane.signed_distance(&target);
        let d_image = plane.signed_distance(&image);
        // the straight line to the image must cross the plane strictly between
        if d_target.abs() <= SELF_INTERSECTION_EPS
            || d_image.abs() <= SELF_INTERSECTION_EPS
            || d_target.signum() == d_image.signum()
        {
            return None;
        }
        let t = d_target / (d_target - d_image);
        let x = target + t * (image - target);
        if !chain[i].facet.contains_planar_point(&x, EXTENT_TOL) {
            return None;
        }
        vertices[i] = x;
        target = x;
    }

    // predecessor and successor of every bounce sit on the same side of it
    for i in 0..n {
        let plane = &chain[i].plane;
        let prev = if i == 0 { *point } else { vertices[i - 1] };
        let next = if i + 1 == n { *antenna } else { vertices[i + 1] };
        let dp = plane.signed_distance(&prev);
        let dn = plane.signed_distance(&next);
        if dp.abs() <= SELF_INTERSECTION_EPS || dn.abs() <= SELF_INTERSECTION_EPS || dp.signum() != dn.signum() {
            return None;
        }
    }

    let ids: Sequence = chain.iter().map(|r| r.facet.id()).collect();
    for i in 0..=n {
        let (a, b, ignore): (Vec3, Vec3, SmallVec<[SurfaceId; 2]>) = if i == 0 {
            (*point, vertices[0], smallvec::smallvec![ids[0]])
        } else if i == n {
            (vertices[n - 1], *antenna, smallvec::smallvec![ids[n - 1]])
        } else {
            (vertices[i - 1], vertices[i], smallvec::smallvec![ids[i - 1], ids[i]])
        };
        if scene.occluded(&a, &b, &ignore) {
            return None;
        }
    }

    let normals: Vertices = chain.iter().map(|r| r.plane.normal()).collect();
    Some(PropagationPath::from_chain(*point, *antenna, vertices, normals, ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Facet;

    fn ground_scene(with_occluder: bool) -> Scene {
        let ground = Facet::infinite_plane(SurfaceId(0), Vec3::zeros(), Vec3::z()).unwrap();
        let mut facets = Vec::new();
        let mut occ = Vec::new();
        if with_occluder {
            // vertical plate across the direct path, well above the bounce path
            facets.push(
                Facet::rectangle(SurfaceId(1), Vec3::new(0.4, 0.0, 0.7), Vec3::y(), Vec3::z(), 1.0, 0.4).unwrap(),
            );
            occ.push(SurfaceId(1));
        }
        Scene::new(facets, vec![ground], occ).unwrap()
    }

    #[test]
    fn ground_plane_two_paths() {
        let scene = ground_scene(false);
        let p = Vec3::new(0.0, 0.0, 0.7);
        let a = Vec3::new(0.8, 0.0, 0.7);
        let paths = find_paths_images(&p, &a, &scene, 1).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths[0].is_line_of_sight());
        assert!((paths[0].total_length - 0.8).abs() < 1e-15);
        let closed_form = (0.8f64 * 0.8 + 1.4 * 1.4).sqrt();
        assert!((paths[1].total_length - closed_form).abs() <= 1e-12 * closed_form);
        assert!((paths[1].total_length - 1.612452).abs() < 1e-6);
        assert_eq!(paths[1].interaction_sequence.as_slice(), &[SurfaceId(0)]);
    }

    #[test]
    fn occluder_removes_line_of_sight() {
        let scene = ground_scene(true);
        let paths = find_paths_images(&Vec3::new(0.0, 0.0, 0.7), &Vec3::new(0.8, 0.0, 0.7), &scene, 1).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].order(), 1);
    }

    #[test]
    fn order_zero_is_line_of_sight_only() {
        let scene = ground_scene(false);
        let paths = find_paths_images(&Vec3::new(0.0, 0.0, 0.7), &Vec3::new(0.8, 0.0, 0.7), &scene, 0).unwrap();
        assert_eq!(paths.len(), 1);
        assert!(paths[0].is_line_of_sight());
    }

    #[test]
    fn folded_mesh_is_non_planar_reflector() {
        let folded = Facet::mesh(
            SurfaceId(4),
            vec![
                [Vec3::zeros(), Vec3::x(), Vec3::y()],
                [Vec3::x(), Vec3::new(1.0, 0.0, 1.0), Vec3::y()],
            ],
        )
        .unwrap();
        let scene = Scene::new(vec![folded], vec![], []).unwrap();
        assert_eq!(
            find_paths_images(&Vec3::z(), &Vec3::new(0.0, 1.0, 1.0), &scene, 1).unwrap_err(),
            Error::NonPlanarReflector(SurfaceId(4))
        );
    }

    #[test]
    fn order_above_limit_rejected() {
        let scene = ground_scene(false);
        assert!(find_paths_images(&Vec3::z(), &Vec3::x(), &scene, 6).is_err());
    }

    #[test]
    fn parallel_walls_higher_orders() {
        // two infinite walls x = ±0.3; point and antenna on the same line y
        let w1 = Facet::infinite_plane(SurfaceId(1), Vec3::new(0.3, 0.0, 0.0), Vec3::x()).unwrap();
        let w2 = Facet::infinite_plane(SurfaceId(2), Vec3::new(-0.3, 0.0, 0.0), -Vec3::x()).unwrap();
        let scene = Scene::new(vec![], vec![w1, w2], []).unwrap();
        let p = Vec3::new(0.0, 0.0, 0.0);
        let a = Vec3::new(0.1, -1.0, 0.0);
        let paths = find_paths_images(&p, &a, &scene, 3).unwrap();
        // LOS + one path per non-repeating sequence of length 1..=3
        assert_eq!(paths.len(), 1 + 2 + 2 + 2);
        for path in &paths {
            let seg_sum: f64 = path.segments().map(|(u, v)| (v - u).norm()).sum();
            assert!((seg_sum - path.total_length).abs() < 1e-12);
            // unfolded image distance equals the path length
            let mut img = p;
            for id in &path.interaction_sequence {
                img = scene.surface(*id).unwrap().plane().unwrap().mirror_point(&img);
            }
            assert!(((a - img).norm() - path.total_length).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_sequence_matches_enumeration() {
        let scene = ground_scene(true);
        let p = Vec3::new(0.0, 0.1, 0.7);
        let a = Vec3::new(0.9, -0.2, 0.5);
        let all = find_paths_images(&p, &a, &scene, 2).unwrap();
        for path in &all {
            let again = trace_sequence(&p, &a, &scene, &path.interaction_sequence)
                .unwrap()
                .unwrap();
            assert_eq!(&again, path);
        }
        assert!(trace_sequence(&p, &a, &scene, &[SurfaceId(0), SurfaceId(0)])
            .unwrap()
            .is_none());
    }
}
