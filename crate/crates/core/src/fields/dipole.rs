use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{try_normalize, Facet, Vec3};
use crate::propagation::pec_reflect;

pub type CVec3 = nalgebra::Vector3<Complex64>;

/// How much of the dipole field a synthesizer keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode {
    /// Unit magnitude, polarization direction and propagation phase only.
    #[default]
    PhaseOnly,
    /// Transverse `sin θ / R` term.
    FarField,
    /// Complete infinitesimal-dipole field with the 1/R² and 1/R³ terms.
    Full,
}

/// Hertzian dipole radiator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleSource {
    pub position: Vec3,
    /// Unit current direction.
    pub orientation: Vec3,
    #[serde(default = "unit_amplitude")]
    pub amplitude: Complex64,
}

fn unit_amplitude() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl DipoleSource {
    pub fn new(position: Vec3, orientation: Vec3) -> Result<Self> {
        let orientation = try_normalize(&orientation)
            .ok_or_else(|| Error::InvalidArgument("dipole orientation must be non-zero".into()))?;
        Ok(Self {
            position,
            orientation,
            amplitude: unit_amplitude(),
        })
    }

    pub fn with_amplitude(mut self, amplitude: Complex64) -> Self {
        self.amplitude = amplitude;
        self
    }
}

/// Electric field of `src` at `obs` for wavenumber `k` (rad/m), `e^{jωt}`
/// convention. Normalized so that the far-field magnitude at R = 1 m on
/// broadside equals `|amplitude|`.
pub fn dipole_field(obs: &Vec3, src: &DipoleSource, k: f64, mode: AmplitudeMode) -> Result<CVec3> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {k}")));
    }
    let delta = obs - src.position;
    let r = delta.norm();
    if r == 0.0 {
        return Err(Error::Singular);
    }
    let rhat = delta / r;
    let p = src.orientation;
    let transverse = p - p.dot(&rhat) * rhat;
    let phase = Complex64::cis(-k * r) * src.amplitude;
    let field = match mode {
        AmplitudeMode::PhaseOnly => match try_normalize(&transverse) {
            Some(t) => t.map(|c| phase * c),
            None => CVec3::zeros(),
        },
        AmplitudeMode::FarField => transverse.map(|c| phase * (c / r)),
        AmplitudeMode::Full => {
            let kr = k * r;
            // [3 r̂(r̂·p) − p] (1/(kR)² + j/(kR))
            let near = Complex64::new(1.0 / (kr * kr), 1.0 / kr);
            let longitudinal = 3.0 * p.dot(&rhat) * rhat - p;
            CVec3::from_fn(|i, _| phase / r * (transverse[i] + near * longitudinal[i]))
        }
    };
    Ok(field)
}

/// PEC image of `src` in an infinite ground plane: mirrored position,
/// tangential orientation negated, normal component kept.
pub fn image_dipole(src: &DipoleSource, ground_plane: &Facet) -> Result<DipoleSource> {
    if !ground_plane.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "image theory needs an infinite plane, surface {} is finite",
            ground_plane.id()
        )));
    }
    let plane = ground_plane.plane().expect("infinite planes are planar");
    Ok(DipoleSource {
        position: plane.mirror_point(&src.position),
        orientation: pec_reflect(&src.orientation, &plane.normal()),
        amplitude: src.amplitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SurfaceId;

    fn cnorm(v: &CVec3) -> f64 {
        v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn null_on_axis() {
        let src = DipoleSource::new(Vec3::zeros(), Vec3::z()).unwrap();
        let e = dipole_field(&Vec3::new(0.0, 0.0, 3.0), &src, 400.0, AmplitudeMode::FarField).unwrap();
        assert_eq!(cnorm(&e), 0.0);
    }

    #[test]
    fn phase_only_broadside() {
        let src = DipoleSource::new(Vec3::zeros(), Vec3::z()).unwrap();
        let k = 2.0 * std::f64::consts::PI * 19e9 / 299_792_458.0;
        let r = 1.37;
        let e = dipole_field(&Vec3::new(r, 0.0, 0.0), &src, k, AmplitudeMode::PhaseOnly).unwrap();
        assert!((cnorm(&e) - 1.0).abs() < 1e-15);
        let expected = Complex64::cis(-k * r);
        assert!((e[2] - expected).norm() < 1e-12);
    }

    #[test]
    fn far_field_normalization() {
        let src = DipoleSource::new(Vec3::zeros(), Vec3::z()).unwrap();
        let e = dipole_field(&Vec3::new(0.0, 1.0, 0.0), &src, 50.0, AmplitudeMode::FarField).unwrap();
        assert!((cnorm(&e) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_matches_far_field_at_kr_100() {
        // broadside: E_full = p (1 − 1/(kR)² − j/(kR)) e^{−jkR}/R
        let src = DipoleSource::new(Vec3::zeros(), Vec3::x()).unwrap();
        let r = 0.5;
        let k = 100.0 / r;
        let obs = Vec3::new(0.0, r, 0.0);
        let full = dipole_field(&obs, &src, k, AmplitudeMode::Full).unwrap();
        let far = dipole_field(&obs, &src, k, AmplitudeMode::FarField).unwrap();
        let rel = (cnorm(&full) - cnorm(&far)).abs() / cnorm(&far);
        let kr: f64 = 100.0;
        let closed = ((1.0 - 1.0 / (kr * kr)).powi(2) + 1.0 / (kr * kr)).sqrt();
        assert!((rel - (1.0 - closed)).abs() < 1e-12);
        assert!(rel < 2e-4);
    }

    #[test]
    fn singular_and_bad_k() {
        let src = DipoleSource::new(Vec3::zeros(), Vec3::z()).unwrap();
        assert_eq!(
            dipole_field(&Vec3::zeros(), &src, 1.0, AmplitudeMode::Full).unwrap_err(),
            Error::Singular
        );
        assert!(dipole_field(&Vec3::x(), &src, 0.0, AmplitudeMode::Full).is_err());
    }

    #[test]
    fn image_orientation_rules() {
        let ground = Facet::infinite_plane(SurfaceId(0), Vec3::zeros(), Vec3::z()).unwrap();
        let v = DipoleSource::new(Vec3::new(0.0, 0.0, 0.7), Vec3::z()).unwrap();
        let vi = image_dipole(&v, &ground).unwrap();
        assert_eq!(vi.position, Vec3::new(0.0, 0.0, -0.7));
        assert_eq!(vi.orientation, Vec3::z());
        let h = DipoleSource::new(Vec3::new(0.0, 0.0, 0.7), Vec3::x()).unwrap();
        let hi = image_dipole(&h, &ground).unwrap();
        assert_eq!(hi.orientation, -Vec3::x());
        assert_eq!(hi.position, Vec3::new(0.0, 0.0, -0.7));
    }

    #[test]
    fn horizontal_dipole_in_plane_cancels_tangential_field() {
        let ground = Facet::infinite_plane(SurfaceId(0), Vec3::zeros(), Vec3::z()).unwrap();
        let src = DipoleSource::new(Vec3::zeros(), Vec3::x()).unwrap();
        let img = image_dipole(&src, &ground).unwrap();
        let obs = Vec3::new(0.3, 0.4, 0.0);
        let total = dipole_field(&obs, &src, 300.0, AmplitudeMode::Full).unwrap()
            + dipole_field(&obs, &img, 300.0, AmplitudeMode::Full).unwrap();
        assert!(total[0].norm() < 1e-15 && total[1].norm() < 1e-15);
    }
}
