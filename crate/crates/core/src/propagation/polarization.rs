//! PEC polarization transport along a bounce chain.
//!
//! At a perfect conductor the tangential field flips sign and the normal
//! component is kept: `E ← 2(E·n)n − E`. This map is orthogonal, so the
//! transported vector keeps its norm and stays transverse to the reflected
//! direction.

use serde::{Deserialize, Serialize};

use super::PropagationPath;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Normalized co-polar projections smaller than this are cross-polarized.
pub const CROSS_POL_THRESHOLD: f64 = 1e-3;

const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolSign {
    Plus,
    Minus,
}

impl PolSign {
    pub fn from_value(v: f64) -> Self {
        if v < 0.0 {
            PolSign::Minus
        } else {
            PolSign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            PolSign::Plus => 1.0,
            PolSign::Minus => -1.0,
        }
    }

    pub fn product(self, other: PolSign) -> PolSign {
        if self == other {
            PolSign::Plus
        } else {
            PolSign::Minus
        }
    }
}

/// PEC boundary reflection of a field vector.
#[inline]
pub fn pec_reflect(e: &Vec3, normal: &Vec3) -> Vec3 {
    2.0 * e.dot(normal) * normal - e
}

/// Carries the unit field `e0` (transverse to the first segment) through every
/// bounce of `path`, then projects onto `copol`.
pub fn transport_polarization(e0: &Vec3, path: &PropagationPath, copol: &Vec3) -> Result<(Vec3, PolSign)> {
    if (e0.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidArgument(format!(
            "initial polarization must be unit-norm, |e0| = {}",
            e0.norm()
        )));
    }
    let along = e0.dot(&path.first_direction());
    if along.abs() > UNIT_TOL {
        return Err(Error::InvalidArgument(format!(
            "initial polarization is not transverse to the first segment (e0·d = {along:e})"
        )));
    }
    let e = transport_unchecked(e0, path);
    let projection = e.dot(copol);
    if projection.abs() < CROSS_POL_THRESHOLD {
        return Err(Error::CrossPolarized(projection.abs()));
    }
    Ok((e, PolSign::from_value(projection)))
}

#[inline]
fn transport_unchecked(e0: &Vec3, path: &PropagationPath) -> Vec3 {
    path.normals.iter().fold(*e0, |e, n| pec_reflect(&e, n))
}

/// Polarization bookkeeping for one leg radiated by a dipole of unit
/// orientation `orientation` at `endpoint_a`, received co-polar to `copol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegPolarization {
    /// Far-field pattern factor `|p⊥|` at departure (sin θ).
    pub pattern: f64,
    /// Transported unit field at `endpoint_b`.
    pub e_final: Vec3,
    /// `e_final · copol`, signed.
    pub projection: f64,
    pub sign: PolSign,
}

impl LegPolarization {
    /// Real far-field weight `pattern × projection` (without the 1/R factor).
    pub fn amplitude(&self) -> f64 {
        self.pattern * self.projection
    }
}

/// Polarization of a leg excited by a dipole along `orientation`. Departure
/// along the dipole axis (`pattern < CROSS_POL_THRESHOLD`) and near-orthogonal
/// arrival are both reported as `CrossPolarized`.
pub fn leg_polarization(path: &PropagationPath, orientation: &Vec3, copol: &Vec3) -> Result<LegPolarization> {
    let d0 = path.first_direction();
    let transverse = orientation - orientation.dot(&d0) * d0;
    let pattern = transverse.norm();
    if pattern < CROSS_POL_THRESHOLD {
        return Err(Error::CrossPolarized(pattern));
    }
    let e0 = transverse / pattern;
    let e_final = transport_unchecked(&e0, path);
    let projection = e_final.dot(copol);
    if projection.abs() < CROSS_POL_THRESHOLD {
        return Err(Error::CrossPolarized(projection.abs()));
    }
    Ok(LegPolarization {
        pattern,
        e_final,
        projection,
        sign: PolSign::from_value(projection),
    })
}

impl PropagationPath {
    /// Co-polar sign of this leg for antennas polarized along `copol`.
    pub fn pol_sign(&self, copol: &Vec3) -> Result<PolSign> {
        leg_polarization(self, copol, copol).map(|p| p.sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SurfaceId;
    use proptest::prelude::*;

    fn ground_bounce() -> PropagationPath {
        // plane of incidence is x-z; the bounce is at the origin
        PropagationPath::from_chain(
            Vec3::new(-0.4, 0.0, 0.7),
            Vec3::new(0.4, 0.0, 0.7),
            [Vec3::zeros()].into_iter().collect(),
            [Vec3::z()].into_iter().collect(),
            [SurfaceId(0)].into_iter().collect(),
        )
    }

    #[test]
    fn s_polarized_single_bounce_flips() {
        let path = ground_bounce();
        let (e, sign) = transport_polarization(&Vec3::y(), &path, &Vec3::y()).unwrap();
        assert_eq!(e, -Vec3::y());
        assert_eq!(sign, PolSign::Minus);
    }

    #[test]
    fn line_of_sight_is_identity() {
        let path = PropagationPath::line_of_sight(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0));
        let (e, sign) = transport_polarization(&Vec3::z(), &path, &Vec3::z()).unwrap();
        assert_eq!(e, Vec3::z());
        assert_eq!(sign, PolSign::Plus);
    }

    #[test]
    fn two_bounces_on_parallel_planes_restore_sign() {
        // between z = 0 and z = 1, s-polarized along y
        let path = PropagationPath::from_chain(
            Vec3::new(0.0, 0.0, 0.5),
            Vec3::new(2.0, 0.0, 0.5),
            [Vec3::new(0.5, 0.0, 1.0), Vec3::new(1.5, 0.0, 0.0)]
                .into_iter()
                .collect(),
            [Vec3::z(), Vec3::z()].into_iter().collect(),
            [SurfaceId(1), SurfaceId(0)].into_iter().collect(),
        );
        let (_, sign) = transport_polarization(&Vec3::y(), &path, &Vec3::y()).unwrap();
        assert_eq!(sign, PolSign::Plus);
    }

    #[test]
    fn cross_polarized_is_reported() {
        let path = PropagationPath::line_of_sight(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0));
        let err = transport_polarization(&Vec3::z(), &path, &Vec3::y()).unwrap_err();
        assert!(matches!(err, Error::CrossPolarized(_)));
    }

    #[test]
    fn non_transverse_input_rejected() {
        let path = PropagationPath::line_of_sight(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0));
        assert!(matches!(
            transport_polarization(&Vec3::x(), &path, &Vec3::x()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn on_axis_departure_is_cross_polarized() {
        let path = PropagationPath::line_of_sight(Vec3::zeros(), Vec3::new(0.0, 0.0, 2.0));
        assert!(matches!(
            leg_polarization(&path, &Vec3::z(), &Vec3::z()),
            Err(Error::CrossPolarized(_))
        ));
    }

    proptest! {
        #[test]
        fn transport_preserves_norm(
            normals in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 0..6),
            e in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        ) {
            let e = Vec3::new(e.0, e.1, e.2);
            prop_assume!(e.norm() > 1e-3);
            let e = e.normalize();
            let mut v = e;
            for n in normals {
                let n = Vec3::new(n.0, n.1, n.2);
                if n.norm() < 1e-3 { continue; }
                v = pec_reflect(&v, &n.normalize());
            }
            prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}
