//! Vector math, PEC facets, scene container, BVH acceleration and ray queries.
//!
//! Everything here is immutable after construction and shared freely between
//! worker threads.

mod bvh;
mod facet;
mod scene;

pub use bvh::{Aabb, Bvh, BvhNode};
pub use facet::{Facet, Material, Shape, SurfaceId};
pub use scene::{intersect, occluded, Hit, Ray, Scene};

use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Self-intersection guard for ray parameters and segment endpoints, meters.
pub const SELF_INTERSECTION_EPS: f64 = 1e-7;
/// Incidence with |d·n| at or below this value is treated as grazing.
pub const GRAZING_TOL: f64 = 1e-9;
/// Smallest admissible facet area, m².
pub const MIN_FACET_AREA: f64 = 1e-12;

/// Infinite supporting plane of a planar facet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    point: Vec3,
    normal: Vec3,
}

impl Plane {
    pub fn new(point: Vec3, normal: Vec3) -> Result<Self> {
        let norm = normal.norm();
        if norm <= 0.0 || !norm.is_finite() || !point.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "plane normal must be finite and non-zero, got {normal:?}"
            )));
        }
        Ok(Self {
            point,
            normal: normal / norm,
        })
    }

    pub fn point(&self) -> Vec3 {
        self.point
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    #[inline]
    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        (p - self.point).dot(&self.normal)
    }

    #[inline]
    pub fn mirror_point(&self, p: &Vec3) -> Vec3 {
        p - 2.0 * self.signed_distance(p) * self.normal
    }

    /// Householder reflection of a free vector (no translation).
    #[inline]
    pub fn mirror_vector(&self, v: &Vec3) -> Vec3 {
        v - 2.0 * v.dot(&self.normal) * self.normal
    }
}

/// Specular reflection `d − 2(d·n)n` of a unit direction about a unit normal.
pub fn reflect_direction(d: &Vec3, n: &Vec3) -> Result<Vec3> {
    let dn = d.dot(n);
    if dn.abs() <= GRAZING_TOL {
        return Err(Error::GrazingIncidence(dn.abs()));
    }
    Ok(d - 2.0 * dn * n)
}

/// Reflection of `p` across the supporting plane.
pub fn mirror_point(p: &Vec3, plane: &Plane) -> Vec3 {
    plane.mirror_point(p)
}

/// Normalizes `v`, returning `None` for (near-)zero vectors.
#[inline]
pub fn try_normalize(v: &Vec3) -> Option<Vec3> {
    let n = v.norm();
    (n > 1e-300 && n.is_finite()).then(|| v / n)
}
