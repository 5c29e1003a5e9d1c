use std::collections::{BTreeSet, HashSet};

use super::bvh::{Aabb, Bvh};
use super::facet::{Facet, Shape, SurfaceId};
use super::{Vec3, GRAZING_TOL, SELF_INTERSECTION_EPS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit direction.
    pub direction: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, direction: Vec3) -> Self {
        Self { origin, direction }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + t * self.direction
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
    /// Geometric unit normal of the surface element that was hit.
    pub normal: Vec3,
    pub surface_id: SurfaceId,
}

/// Finite intersectable element: a facet is split into one or more of these.
#[derive(Debug, Clone)]
enum Primitive {
    Triangle {
        v: [Vec3; 3],
        normal: Vec3,
    },
    Rectangle {
        center: Vec3,
        u_axis: Vec3,
        v_axis: Vec3,
        half_u: f64,
        half_v: f64,
        normal: Vec3,
    },
}

#[derive(Debug, Clone)]
struct PrimRef {
    surface: SurfaceId,
    prim: Primitive,
}

impl Primitive {
    fn bounds(&self) -> Aabb {
        match self {
            Primitive::Triangle { v, .. } => Aabb::from_points(v.iter()),
            Primitive::Rectangle {
                center,
                u_axis,
                v_axis,
                half_u,
                half_v,
                ..
            } => {
                let du = u_axis * *half_u;
                let dv = v_axis * *half_v;
                let corners = [center + du + dv, center + du - dv, center - du + dv, center - du - dv];
                Aabb::from_points(corners.iter())
            }
        }
    }

    fn normal(&self) -> Vec3 {
        match self {
            Primitive::Triangle { normal, .. } | Primitive::Rectangle { normal, .. } => *normal,
        }
    }

    #[inline]
    fn intersect(&self, origin: &Vec3, dir: &Vec3) -> Option<f64> {
        match self {
            Primitive::Triangle { v, normal } => {
                if dir.dot(normal).abs() <= GRAZING_TOL {
                    return None;
                }
                intersect_triangle_watertight(origin, dir, v)
            }
            Primitive::Rectangle {
                center,
                u_axis,
                v_axis,
                half_u,
                half_v,
                normal,
            } => {
                let t = intersect_plane(origin, dir, center, normal)?;
                let d = origin + t * dir - center;
                (d.dot(u_axis).abs() <= *half_u && d.dot(v_axis).abs() <= *half_v).then_some(t)
            }
        }
    }
}

#[inline]
fn intersect_plane(origin: &Vec3, dir: &Vec3, point: &Vec3, normal: &Vec3) -> Option<f64> {
    let denom = dir.dot(normal);
    if denom.abs() <= GRAZING_TOL {
        return None;
    }
    Some((point - origin).dot(normal) / denom)
}

/// Watertight ray/triangle test (Woop, Benthin & Wald). Edge functions on a
/// shared edge are exact negations of each other, so a ray through the edge
/// is reported by at least one of the two triangles.
#[inline]
fn intersect_triangle_watertight(origin: &Vec3, dir: &Vec3, v: &[Vec3; 3]) -> Option<f64> {
    let kz = dir.iamax();
    let mut kx = (kz + 1) % 3;
    let mut ky = (kx + 1) % 3;
    if dir[kz] < 0.0 {
        std::mem::swap(&mut kx, &mut ky);
    }
    let sx = dir[kx] / dir[kz];
    let sy = dir[ky] / dir[kz];
    let sz = 1.0 / dir[kz];

    let a = v[0] - origin;
    let b = v[1] - origin;
    let c = v[2] - origin;
    let ax = a[kx] - sx * a[kz];
    let ay = a[ky] - sy * a[kz];
    let bx = b[kx] - sx * b[kz];
    let by = b[ky] - sy * b[kz];
    let cx = c[kx] - sx * c[kz];
    let cy = c[ky] - sy * c[kz];

    let u = cx * by - cy * bx;
    let vv = ax * cy - ay * cx;
    let w = bx * ay - by * ax;
    if (u < 0.0 || vv < 0.0 || w < 0.0) && (u > 0.0 || vv > 0.0 || w > 0.0) {
        return None;
    }
    let det = u + vv + w;
    if det == 0.0 {
        return None;
    }
    let az = sz * a[kz];
    let bz = sz * b[kz];
    let cz = sz * c[kz];
    let t = (u * az + vv * bz + w * cz) / det;
    Some(t)
}

/// Immutable collection of PEC surfaces plus the BVH over their finite parts.
#[derive(Debug, Clone)]
pub struct Scene {
    facets: Vec<Facet>,
    infinite_planes: Vec<Facet>,
    occluder_ids: BTreeSet<SurfaceId>,
    prims: Vec<PrimRef>,
    bvh: Bvh,
}

impl Default for Scene {
    fn default() -> Self {
        Self::empty()
    }
}

impl Scene {
    pub fn empty() -> Self {
        Self {
            facets: Vec::new(),
            infinite_planes: Vec::new(),
            occluder_ids: BTreeSet::new(),
            prims: Vec::new(),
            bvh: Bvh::default(),
        }
    }

    /// `facets` must be finite; `infinite_planes` must all be unbounded.
    /// `occluder_ids` flags the facets that act as line-of-sight blockers
    /// (every facet still blocks and reflects; the flag is descriptive).
    pub fn new(
        facets: Vec<Facet>,
        infinite_planes: Vec<Facet>,
        occluder_ids: impl IntoIterator<Item = SurfaceId>,
    ) -> Result<Self> {
        let mut ids = HashSet::new();
        for f in facets.iter().chain(&infinite_planes) {
            if !ids.insert(f.id()) {
                return Err(Error::DuplicateSurfaceId(f.id()));
            }
        }
        if let Some(f) = facets.iter().find(|f| f.is_infinite()) {
            return Err(Error::InvalidArgument(format!(
                "surface {} is unbounded; pass it as an infinite plane",
                f.id()
            )));
        }
        if let Some(f) = infinite_planes.iter().find(|f| !f.is_infinite()) {
            return Err(Error::InvalidArgument(format!(
                "surface {} is finite but listed as an infinite plane",
                f.id()
            )));
        }
        let occluder_ids: BTreeSet<SurfaceId> = occluder_ids.into_iter().collect();
        if let Some(id) = occluder_ids.iter().find(|id| !ids.contains(id)) {
            return Err(Error::UnknownOccluder(*id));
        }

        let mut prims = Vec::new();
        for f in &facets {
            let surface = f.id();
            match f.shape() {
                Shape::Triangle(v) => prims.push(PrimRef {
                    surface,
                    prim: Primitive::Triangle {
                        v: *v,
                        normal: f.normal().expect("triangles are planar"),
                    },
                }),
                Shape::Rectangle {
                    center,
                    u_axis,
                    v_axis,
                    half_u,
                    half_v,
                } => prims.push(PrimRef {
                    surface,
                    prim: Primitive::Rectangle {
                        center: *center,
                        u_axis: *u_axis,
                        v_axis: *v_axis,
                        half_u: *half_u,
                        half_v: *half_v,
                        normal: f.normal().expect("rectangles are planar"),
                    },
                }),
                Shape::Mesh(tris) => {
                    for v in tris {
                        let n = (v[1] - v[0]).cross(&(v[2] - v[0])).normalize();
                        prims.push(PrimRef {
                            surface,
                            prim: Primitive::Triangle { v: *v, normal: n },
                        });
                    }
                }
                Shape::InfinitePlane { .. } => unreachable!("checked above"),
            }
        }
        let boxes: Vec<Aabb> = prims.iter().map(|p| p.prim.bounds()).collect();
        let bvh = Bvh::build(&boxes);
        Ok(Self {
            facets,
            infinite_planes,
            occluder_ids,
            prims,
            bvh,
        })
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn infinite_planes(&self) -> &[Facet] {
        &self.infinite_planes
    }

    pub fn occluder_ids(&self) -> &BTreeSet<SurfaceId> {
        &self.occluder_ids
    }

    /// All surfaces: finite facets first, then infinite planes.
    pub fn surfaces(&self) -> impl Iterator<Item = &Facet> {
        self.facets.iter().chain(&self.infinite_planes)
    }

    pub fn surface(&self, id: SurfaceId) -> Option<&Facet> {
        self.surfaces().find(|f| f.id() == id)
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty() && self.infinite_planes.is_empty()
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    /// Bounding boxes of the finite primitives, in BVH primitive order.
    pub fn primitive_bounds(&self) -> Vec<Aabb> {
        self.prims.iter().map(|p| p.prim.bounds()).collect()
    }

    /// Nearest hit with `t > SELF_INTERSECTION_EPS`.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        self.intersect_filtered(ray, f64::INFINITY, |_| true)
    }

    /// Same contract as [`Scene::intersect`], scanning every primitive.
    pub fn intersect_brute_force(&self, ray: &Ray) -> Option<Hit> {
        let mut best: Option<(f64, usize)> = None;
        for (i, p) in self.prims.iter().enumerate() {
            if let Some(t) = p.prim.intersect(&ray.origin, &ray.direction) {
                if t > SELF_INTERSECTION_EPS && best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, i));
                }
            }
        }
        let finite = best.map(|(t, i)| self.finite_hit(ray, t, i));
        self.nearest_with_planes(ray, finite, f64::INFINITY, |_| true)
    }

    fn finite_hit(&self, ray: &Ray, t: f64, prim: usize) -> Hit {
        let p = &self.prims[prim];
        Hit {
            t,
            point: ray.at(t),
            normal: p.prim.normal(),
            surface_id: p.surface,
        }
    }

    fn nearest_with_planes<F>(&self, ray: &Ray, mut best: Option<Hit>, t_max: f64, accept: F) -> Option<Hit>
    where
        F: Fn(SurfaceId) -> bool,
    {
        for f in &self.infinite_planes {
            if !accept(f.id()) {
                continue;
            }
            let plane = f.plane().expect("infinite planes are planar");
            if let Some(t) = intersect_plane(&ray.origin, &ray.direction, &plane.point(), &plane.normal()) {
                if t > SELF_INTERSECTION_EPS && t <= t_max && best.as_ref().is_none_or(|b| t < b.t) {
                    best = Some(Hit {
                        t,
                        point: ray.at(t),
                        normal: plane.normal(),
                        surface_id: f.id(),
                    });
                }
            }
        }
        best
    }

    /// Nearest hit in `(SELF_INTERSECTION_EPS, t_max]` among surfaces for
    /// which `accept` returns true.
    pub fn intersect_filtered<F>(&self, ray: &Ray, t_max: f64, accept: F) -> Option<Hit>
    where
        F: Fn(SurfaceId) -> bool,
    {
        let finite = self
            .bvh
            .closest(&ray.origin, &ray.direction, SELF_INTERSECTION_EPS, t_max, |i, limit| {
                let p = &self.prims[i];
                if !accept(p.surface) {
                    return None;
                }
                p.prim
                    .intersect(&ray.origin, &ray.direction)
                    .filter(|&t| t > SELF_INTERSECTION_EPS && t <= limit)
            })
            .map(|(t, i)| self.finite_hit(ray, t, i));
        self.nearest_with_planes(ray, finite, t_max, accept)
    }

    /// True iff a surface outside `ignore` crosses the open segment `(a, b)`,
    /// excluding `SELF_INTERSECTION_EPS` at both ends. Segments running
    /// parallel to a surface never count as blocked by it.
    pub fn occluded(&self, a: &Vec3, b: &Vec3, ignore: &[SurfaceId]) -> bool {
        let delta = b - a;
        let len = delta.norm();
        if len <= 2.0 * SELF_INTERSECTION_EPS {
            return false;
        }
        let dir = delta / len;
        let t_max = len - SELF_INTERSECTION_EPS;
        let keep = |id: SurfaceId| !ignore.contains(&id);
        let hit_finite = self.bvh.any(a, &dir, SELF_INTERSECTION_EPS, t_max, |i| {
            let p = &self.prims[i];
            keep(p.surface)
                && p.prim
                    .intersect(a, &dir)
                    .is_some_and(|t| t > SELF_INTERSECTION_EPS && t < t_max)
        });
        if hit_finite {
            return true;
        }
        self.infinite_planes.iter().any(|f| {
            keep(f.id()) && {
                let plane = f.plane().expect("infinite planes are planar");
                intersect_plane(a, &dir, &plane.point(), &plane.normal())
                    .is_some_and(|t| t > SELF_INTERSECTION_EPS && t < t_max)
            }
        })
    }
}

/// Nearest hit of `ray` in `scene` (BVH-accelerated).
pub fn intersect(ray: &Ray, scene: &Scene) -> Option<Hit> {
    scene.intersect(ray)
}

/// Whether the open segment `(a, b)` is blocked by a surface not in `ignore`.
pub fn occluded(a: &Vec3, b: &Vec3, scene: &Scene, ignore: &[SurfaceId]) -> bool {
    scene.occluded(a, b, ignore)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground() -> Facet {
        Facet::infinite_plane(SurfaceId(0), Vec3::zeros(), Vec3::z()).unwrap()
    }

    #[test]
    fn ray_hits_ground_plane() {
        let scene = Scene::new(vec![], vec![ground()], []).unwrap();
        let hit = intersect(&Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0)), &scene).unwrap();
        assert_eq!(hit.t, 1.0);
        assert_eq!(hit.point, Vec3::zeros());
        assert_eq!(hit.surface_id, SurfaceId(0));
    }

    #[test]
    fn parallel_ray_misses() {
        let scene = Scene::new(vec![], vec![ground()], []).unwrap();
        assert!(intersect(&Ray::new(Vec3::new(0.0, 0.0, 1.0), Vec3::x()), &scene).is_none());
    }

    #[test]
    fn shared_edge_reports_exactly_one_hit() {
        // unit square split along its diagonal, ray straight through the diagonal
        let quad = Facet::mesh(
            SurfaceId(5),
            vec![
                [Vec3::zeros(), Vec3::x(), Vec3::new(1.0, 1.0, 0.0)],
                [Vec3::zeros(), Vec3::new(1.0, 1.0, 0.0), Vec3::y()],
            ],
        )
        .unwrap();
        let scene = Scene::new(vec![quad], vec![], []).unwrap();
        for s in [0.1, 0.25, 1.0 / 3.0, 0.5, 0.77, 0.9] {
            let ray = Ray::new(Vec3::new(s, s, 2.0), Vec3::new(0.0, 0.0, -1.0));
            let hit = scene.intersect(&ray).expect("no leak through the shared edge");
            assert_eq!(hit.t, 2.0);
            let hits = scene
                .prims
                .iter()
                .filter(|p| p.prim.intersect(&ray.origin, &ray.direction).is_some())
                .count();
            assert!(hits >= 1);
        }
    }

    #[test]
    fn duplicate_ids_rejected() {
        let a = Facet::triangle(SurfaceId(1), [Vec3::zeros(), Vec3::x(), Vec3::y()]).unwrap();
        let b = Facet::infinite_plane(SurfaceId(1), Vec3::zeros(), Vec3::z()).unwrap();
        assert_eq!(
            Scene::new(vec![a], vec![b], []).unwrap_err(),
            Error::DuplicateSurfaceId(SurfaceId(1))
        );
    }

    #[test]
    fn unknown_occluder_rejected() {
        assert!(matches!(
            Scene::new(vec![], vec![ground()], [SurfaceId(9)]),
            Err(Error::UnknownOccluder(_))
        ));
    }

    #[test]
    fn occlusion_rules() {
        let plate = Facet::rectangle(SurfaceId(1), Vec3::new(0.0, 0.0, 0.5), Vec3::x(), Vec3::y(), 1.0, 1.0).unwrap();
        let scene = Scene::new(vec![plate], vec![ground()], [SurfaceId(1)]).unwrap();
        let a = Vec3::new(0.0, 0.0, 1.0);
        let b = Vec3::new(0.1, 0.0, 0.1);
        assert!(occluded(&a, &b, &scene, &[]));
        assert!(occluded(&b, &a, &scene, &[]));
        assert!(!occluded(&a, &b, &scene, &[SurfaceId(1)]));
        // both above everything, nothing in between
        assert!(!occluded(
            &Vec3::new(2.0, 0.0, 0.7),
            &Vec3::new(3.0, 1.0, 0.9),
            &scene,
            &[]
        ));
        // endpoint on the plate edge is inside the endpoint epsilon
        assert!(!occluded(
            &Vec3::new(0.5, 0.0, 0.5 + 0.5e-7),
            &Vec3::new(0.5, 0.0, 2.0),
            &scene,
            &[]
        ));
        // segment lying in the plate plane along its edge
        assert!(!occluded(
            &Vec3::new(0.5, -0.5, 0.5),
            &Vec3::new(0.5, 0.5, 0.5),
            &scene,
            &[]
        ));
    }
}
