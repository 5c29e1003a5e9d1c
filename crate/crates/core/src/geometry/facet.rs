use std::fmt;

use serde::{Deserialize, Serialize};

use super::{try_normalize, Plane, Vec3, GRAZING_TOL, MIN_FACET_AREA};
use crate::error::{Error, Result};

/// Integer identifier of a reflecting surface. Unique within a [`super::Scene`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct SurfaceId(pub u32);

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Material {
    /// Perfect electric conductor.
    #[default]
    Pec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Triangle([Vec3; 3]),
    /// Finite rectangle spanned by two orthonormal in-plane axes.
    Rectangle {
        center: Vec3,
        u_axis: Vec3,
        v_axis: Vec3,
        half_u: f64,
        half_v: f64,
    },
    /// Several triangles that form one surface (one id). Not necessarily planar.
    Mesh(Vec<[Vec3; 3]>),
    InfinitePlane {
        point: Vec3,
        normal: Vec3,
    },
}

/// A PEC surface with an id.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    id: SurfaceId,
    shape: Shape,
    material: Material,
    plane: Option<Plane>,
}

fn triangle_normal(id: SurfaceId, v: &[Vec3; 3]) -> Result<Vec3> {
    if !v.iter().all(|p| p.iter().all(|c| c.is_finite())) {
        return Err(Error::DegenerateFacet {
            id,
            reason: "non-finite vertex".into(),
        });
    }
    let cross = (v[1] - v[0]).cross(&(v[2] - v[0]));
    let area = 0.5 * cross.norm();
    if area <= MIN_FACET_AREA {
        return Err(Error::DegenerateFacet {
            id,
            reason: format!("triangle area {area:e} m² is below {MIN_FACET_AREA:e}"),
        });
    }
    Ok(cross / cross.norm())
}

impl Facet {
    pub fn triangle(id: SurfaceId, vertices: [Vec3; 3]) -> Result<Self> {
        let normal = triangle_normal(id, &vertices)?;
        let plane = Plane::new(vertices[0], normal)?;
        Ok(Self {
            id,
            shape: Shape::Triangle(vertices),
            material: Material::Pec,
            plane: Some(plane),
        })
    }

    /// Rectangle of `width × height` centred at `center`; `u_dir` runs along the
    /// width and `v_dir` along the height. The normal is `u × v`.
    pub fn rectangle(id: SurfaceId, center: Vec3, u_dir: Vec3, v_dir: Vec3, width: f64, height: f64) -> Result<Self> {
        let degenerate = |reason: String| Error::DegenerateFacet { id, reason };
        let u = try_normalize(&u_dir).ok_or_else(|| degenerate("zero u axis".into()))?;
        let v = try_normalize(&v_dir).ok_or_else(|| degenerate("zero v axis".into()))?;
        if u.dot(&v).abs() > GRAZING_TOL {
            return Err(degenerate("rectangle axes are not orthogonal".into()));
        }
        if !(width > 0.0 && height > 0.0) || width * height <= MIN_FACET_AREA {
            return Err(degenerate(format!("rectangle extent {width} × {height}")));
        }
        let normal = u.cross(&v);
        let plane = Plane::new(center, normal)?;
        Ok(Self {
            id,
            shape: Shape::Rectangle {
                center,
                u_axis: u,
                v_axis: v,
                half_u: 0.5 * width,
                half_v: 0.5 * height,
            },
            material: Material::Pec,
            plane: Some(plane),
        })
    }

    pub fn mesh(id: SurfaceId, triangles: Vec<[Vec3; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::DegenerateFacet {
                id,
                reason: "mesh has no triangles".into(),
            });
        }
        let normals = triangles
            .iter()
            .map(|t| triangle_normal(id, t))
            .collect::<Result<Vec<_>>>()?;
        let first = Plane::new(triangles[0][0], normals[0])?;
        let planar = normals.iter().all(|n| n.cross(&normals[0]).norm() <= GRAZING_TOL)
            && triangles
                .iter()
                .flatten()
                .all(|p| first.signed_distance(p).abs() <= GRAZING_TOL);
        Ok(Self {
            id,
            shape: Shape::Mesh(triangles),
            material: Material::Pec,
            plane: planar.then_some(first),
        })
    }

    pub fn infinite_plane(id: SurfaceId, point: Vec3, normal: Vec3) -> Result<Self> {
        let plane = Plane::new(point, normal).map_err(|_| Error::DegenerateFacet {
            id,
            reason: "infinite plane needs a non-zero normal".into(),
        })?;
        Ok(Self {
            id,
            shape: Shape::InfinitePlane {
                point,
                normal: plane.normal(),
            },
            material: Material::Pec,
            plane: Some(plane),
        })
    }

    pub fn id(&self) -> SurfaceId {
        self.id
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn material(&self) -> Material {
        self.material
    }

    /// Supporting plane; `None` for non-planar meshes.
    pub fn plane(&self) -> Option<&Plane> {
        self.plane.as_ref()
    }

    /// Unit normal of the supporting plane, if any.
    pub fn normal(&self) -> Option<Vec3> {
        self.plane.map(|p| p.normal())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.shape, Shape::InfinitePlane { .. })
    }

    /// Whether `p`, assumed to lie on the supporting plane, falls inside the
    /// finite extent (boundary inclusive, with absolute slack `tol`).
    pub fn contains_planar_point(&self, p: &Vec3, tol: f64) -> bool {
        match &self.shape {
            Shape::InfinitePlane { .. } => true,
            Shape::Rectangle {
                center,
                u_axis,
                v_axis,
                half_u,
                half_v,
            } => {
                let d = p - center;
                d.dot(u_axis).abs() <= half_u + tol && d.dot(v_axis).abs() <= half_v + tol
            }
            Shape::Triangle(v) => point_in_triangle(p, v, tol),
            Shape::Mesh(tris) => tris.iter().any(|t| point_in_triangle(p, t, tol)),
        }
    }
}

/// In-plane containment test via edge functions, slack `tol` meters.
fn point_in_triangle(p: &Vec3, v: &[Vec3; 3], tol: f64) -> bool {
    let n = (v[1] - v[0]).cross(&(v[2] - v[0]));
    let n = n / n.norm();
    (0..3).all(|i| {
        let a = v[i];
        let b = v[(i + 1) % 3];
        let edge = b - a;
        // signed distance of p from the edge line, positive inside
        let inward = n.cross(&edge) / edge.norm();
        (p - a).dot(&inward) >= -tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_triangle_rejected() {
        let err = Facet::triangle(SurfaceId(1), [Vec3::zeros(), Vec3::x(), Vec3::x() * 2.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateFacet { .. }));
    }

    #[test]
    fn rectangle_normal_and_containment() {
        let f = Facet::rectangle(SurfaceId(2), Vec3::new(0.0, 0.0, 1.0), Vec3::x(), Vec3::y(), 2.0, 1.0).unwrap();
        assert_eq!(f.normal().unwrap(), Vec3::z());
        assert!(f.contains_planar_point(&Vec3::new(1.0, 0.5, 1.0), 0.0));
        assert!(!f.contains_planar_point(&Vec3::new(1.01, 0.0, 1.0), 0.0));
    }

    #[test]
    fn non_orthogonal_rectangle_rejected() {
        assert!(Facet::rectangle(
            SurfaceId(2),
            Vec3::zeros(),
            Vec3::x(),
            Vec3::new(1.0, 1.0, 0.0),
            1.0,
            1.0
        )
        .is_err());
    }

    #[test]
    fn folded_mesh_has_no_plane() {
        let flat = Facet::mesh(
            SurfaceId(3),
            vec![
                [Vec3::zeros(), Vec3::x(), Vec3::y()],
                [Vec3::x(), Vec3::new(1.0, 1.0, 0.0), Vec3::y()],
            ],
        )
        .unwrap();
        assert!(flat.plane().is_some());
        let folded = Facet::mesh(
            SurfaceId(4),
            vec![
                [Vec3::zeros(), Vec3::x(), Vec3::y()],
                [Vec3::x(), Vec3::new(1.0, 0.0, 1.0), Vec3::y()],
            ],
        )
        .unwrap();
        assert!(folded.plane().is_none());
    }

    #[test]
    fn triangle_containment_on_edges() {
        let v = [Vec3::zeros(), Vec3::x(), Vec3::y()];
        assert!(point_in_triangle(&Vec3::new(0.5, 0.5, 0.0), &v, 1e-12));
        assert!(point_in_triangle(&Vec3::new(0.25, 0.0, 0.0), &v, 0.0));
        assert!(!point_in_triangle(&Vec3::new(0.6, 0.6, 0.0), &v, 1e-9));
    }
}
