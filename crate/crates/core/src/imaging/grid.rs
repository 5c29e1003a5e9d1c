use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

const AXIS_TOL: f64 = 1e-9;

/// Placement of a regular voxel grid. Voxel `(i, j, l)` is centered at
/// `origin + i·dx·ax + j·dy·ay + l·dz·az`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridGeometry {
    pub origin: Vec3,
    pub axes: [Vec3; 3],
    pub spacing: [f64; 3],
    pub dims: [usize; 3],
}

impl GridGeometry {
    pub fn new(origin: Vec3, axes: [Vec3; 3], spacing: [f64; 3], dims: [usize; 3]) -> Result<Self> {
        let g = Self {
            origin,
            axes,
            spacing,
            dims,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid whose voxel centers are symmetric about `center`.
    pub fn centered(center: Vec3, axes: [Vec3; 3], spacing: [f64; 3], dims: [usize; 3]) -> Result<Self> {
        let offset = (0..3).fold(Vec3::zeros(), |acc, a| {
            acc + axes[a] * (spacing[a] * (dims[a].max(1) - 1) as f64 / 2.0)
        });
        Self::new(center - offset, axes, spacing, dims)
    }

    /// Planar `nu × nv` cut spanned by `u` and `v`, centered at `center`.
    pub fn planar(center: Vec3, u: Vec3, v: Vec3, spacing: f64, nu: usize, nv: usize) -> Result<Self> {
        let w = u.cross(&v);
        Self::centered(center, [u, v, w], [spacing; 3], [nu, nv, 1])
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "grid dims must be ≥ 1, got {:?}",
                self.dims
            )));
        }
        if self.spacing.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive, got {:?}",
                self.spacing
            )));
        }
        if !self.origin.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidArgument("grid origin must be finite".into()));
        }
        for a in 0..3 {
            if (self.axes[a].norm() - 1.0).abs() > AXIS_TOL {
                return Err(Error::InvalidArgument(format!("grid axis {a} is not unit length")));
            }
            for b in a + 1..3 {
                if self.axes[a].dot(&self.axes[b]).abs() > AXIS_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "grid axes {a} and {b} are not orthogonal"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index, `i` fastest.
    pub fn index(&self, [i, j, l]: [usize; 3]) -> usize {
        i + self.dims[0] * (j + self.dims[1] * l)
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let rest = idx / self.dims[0];
        [i, rest % self.dims[1], rest / self.dims[1]]
    }

    pub fn voxel_center(&self, [i, j, l]: [usize; 3]) -> Vec3 {
        self.origin
            + self.axes[0] * (i as f64 * self.spacing[0])
            + self.axes[1] * (j as f64 * self.spacing[1])
            + self.axes[2] * (l as f64 * self.spacing[2])
    }

    /// Voxel centers in flat-index order.
    pub fn points(&self) -> Vec<Vec3> {
        (0..self.len()).map(|n| self.voxel_center(self.coords(n))).collect()
    }

    /// Voxel whose center is nearest to `p`, if `p` lies within half a
    /// voxel of the grid.
    pub fn nearest_voxel(&self, p: &Vec3) -> Option<[usize; 3]> {
        let d = p - self.origin;
        let mut out = [0usize; 3];
        for (a, o) in out.iter_mut().enumerate() {
            let t = (d.dot(&self.axes[a]) / self.spacing[a]).round();
            if t < 0.0 || t >= self.dims[a] as f64 {
                return None;
            }
            *o = t as usize;
        }
        Some(out)
    }

    pub fn translated(&self, offset: &Vec3) -> Self {
        Self {
            origin: self.origin + offset,
            ..*self
        }
    }
}

/// Complex reconstruction values on a voxel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    pub geometry: GridGeometry,
    pub values: Vec<Complex64>,
}

impl ImageGrid {
    pub fn zeros(geometry: GridGeometry) -> Result<Self> {
        geometry.validate()?;
        Ok(Self {
            values: vec![Complex64::new(0.0, 0.0); geometry.len()],
            geometry,
        })
    }

    pub fn from_values(geometry: GridGeometry, values: Vec<Complex64>) -> Result<Self> {
        geometry.validate()?;
        if values.len() != geometry.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a grid of {} voxels",
                values.len(),
                geometry.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidArgument("image values must be finite".into()));
        }
        Ok(Self { geometry, values })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.geometry.dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, voxel: [usize; 3]) -> Complex64 {
        self.values[self.geometry.index(voxel)]
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Voxel of largest magnitude; the lowest flat index wins ties.
    pub fn peak_voxel(&self) -> [usize; 3] {
        let mut best = 0;
        let mut best_mag = f64::NEG_INFINITY;
        for (n, v) in self.values.iter().enumerate() {
            let m = v.norm();
            if m > best_mag {
                best = n;
                best_mag = m;
            }
        }
        self.geometry.coords(best)
    }

    pub fn voxel_center(&self, voxel: [usize; 3]) -> Vec3 {
        self.geometry.voxel_center(voxel)
    }

    /// `|s| / max|s|` in dB, clamped below at `floor_db`. An all-zero image
    /// maps to the floor everywhere.
    pub fn normalized_db(&self, floor_db: f64) -> Vec<f64> {
        let max = self.max_abs();
        self.values
            .iter()
            .map(|v| {
                if max == 0.0 {
                    return floor_db;
                }
                let db = 20.0 * (v.norm() / max).log10();
                if db.is_nan() || db < floor_db {
                    floor_db
                } else {
                    db
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axes() -> [Vec3; 3] {
        [Vec3::x(), Vec3::y(), Vec3::z()]
    }

    #[test]
    fn voxel_centers_follow_definition() {
        let g = GridGeometry::new(Vec3::new(1.0, 2.0, 3.0), axes(), [0.1, 0.2, 0.5], [4, 3, 2]).unwrap();
        assert_eq!(g.len(), 24);
        let c = g.voxel_center([3, 2, 1]);
        assert!((c - Vec3::new(1.3, 2.4, 3.5)).norm() < 1e-12);
        for n in 0..g.len() {
            assert_eq!(g.index(g.coords(n)), n);
        }
        assert_eq!(g.nearest_voxel(&Vec3::new(1.31, 2.39, 3.6)), Some([3, 2, 1]));
        assert_eq!(g.nearest_voxel(&Vec3::new(0.0, 2.0, 3.0)), None);
    }

    #[test]
    fn centered_grid_is_symmetric() {
        let g = GridGeometry::planar(Vec3::new(0.0, 0.0, 0.7), Vec3::x(), Vec3::y(), 0.01, 128, 128).unwrap();
        let first = g.voxel_center([0, 0, 0]);
        let last = g.voxel_center([127, 127, 0]);
        assert!(((first + last) / 2.0 - Vec3::new(0.0, 0.0, 0.7)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(GridGeometry::new(Vec3::zeros(), axes(), [0.0, 1.0, 1.0], [1, 1, 1]).is_err());
        assert!(GridGeometry::new(Vec3::zeros(), axes(), [1.0; 3], [0, 1, 1]).is_err());
        let skew = [Vec3::x(), Vec3::new(1.0, 1.0, 0.0).normalize(), Vec3::z()];
        assert!(GridGeometry::new(Vec3::zeros(), skew, [1.0; 3], [1, 1, 1]).is_err());
    }

    #[test]
    fn normalized_db_floor() {
        let g = GridGeometry::new(Vec3::zeros(), axes(), [1.0; 3], [3, 1, 1]).unwrap();
        let img = ImageGrid::from_values(
            g,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let db = img.normalized_db(-40.0);
        assert_eq!(db[0], 0.0);
        assert!((db[1] + 6.0206).abs() < 1e-3);
        assert_eq!(db[2], -40.0);
        assert_eq!(img.peak_voxel(), [0, 0, 0]);
    }
}
