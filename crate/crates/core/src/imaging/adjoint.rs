use ndarray::Array3;
use num_complex::Complex64;

use super::backprojection::{rt_bpa_points, ReconstructionConfig};
use crate::error::{Error, Result};
use crate::fields::{
    synthesize_radiation_data, synthesize_scattering_data, AmplitudeMode, AntennaArray, DipoleSource, FrequencySweep,
    ImagingMode, MeasurementSet, PointScatterer,
};
use crate::geometry::{Scene, Vec3};

/// `⟨a, b⟩ = Σ a·conj(b)`.
pub fn inner<'a>(a: impl IntoIterator<Item = &'a Complex64>, b: impl IntoIterator<Item = &'a Complex64>) -> Complex64 {
    a.into_iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Forward operator restricted to `points` with weights `s`, phase-only
/// convention. Radiation mode places copol dipoles at the points.
pub fn forward_points(
    points: &[Vec3],
    s: &[Complex64],
    array: &AntennaArray,
    scene: &Scene,
    sweep: &FrequencySweep,
    cfg: &ReconstructionConfig,
) -> Result<MeasurementSet> {
    if points.len() != s.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} points but {} weights",
            points.len(),
            s.len()
        )));
    }
    match cfg.mode {
        ImagingMode::Scattering => {
            let targets: Vec<_> = points
                .iter()
                .zip(s)
                .map(|(p, w)| PointScatterer {
                    position: *p,
                    reflectivity: *w,
                })
                .collect();
            synthesize_scattering_data(
                &targets,
                array,
                scene,
                sweep,
                &cfg.path_engine,
                cfg.max_order,
                AmplitudeMode::PhaseOnly,
            )
        }
        ImagingMode::Radiation => {
            let sources = points
                .iter()
                .zip(s)
                .map(|(p, w)| Ok(DipoleSource::new(*p, array.copol)?.with_amplitude(*w)))
                .collect::<Result<Vec<_>>>()?;
            synthesize_radiation_data(
                &sources,
                array,
                scene,
                sweep,
                &cfg.path_engine,
                cfg.max_order,
                AmplitudeMode::PhaseOnly,
            )
        }
    }
}

/// `|⟨F s, T⟩ − ⟨s, F† T⟩| / (‖F s‖·‖T‖)` with `F` the phase-only forward
/// synthesis on `points` and `F†` the ray-traced back-projection under
/// `cfg`. Zero when the two operators are exact adjoints.
pub fn adjoint_pair_check(
    points: &[Vec3],
    array: &AntennaArray,
    scene: &Scene,
    sweep: &FrequencySweep,
    cfg: &ReconstructionConfig,
    random_t: &Array3<Complex64>,
    random_s: &[Complex64],
) -> Result<f64> {
    adjoint_residual(points, array, scene, sweep, cfg, random_t, random_s, |data| {
        rt_bpa_points(data, points, scene, cfg)
    })
}

/// Same residual with a caller-supplied `F†`.
#[allow(clippy::too_many_arguments)]
pub fn adjoint_residual<B>(
    points: &[Vec3],
    array: &AntennaArray,
    scene: &Scene,
    sweep: &FrequencySweep,
    cfg: &ReconstructionConfig,
    random_t: &Array3<Complex64>,
    random_s: &[Complex64],
    backproject: B,
) -> Result<f64>
where
    B: FnOnce(&MeasurementSet) -> Result<Vec<Complex64>>,
{
    let fs = forward_points(points, random_s, array, scene, sweep, cfg)?;
    let t = MeasurementSet::new(
        fs.mode,
        fs.tx_positions.clone(),
        fs.rx_positions.clone(),
        fs.copol,
        fs.sweep,
        random_t.clone(),
    )?;
    let ft = backproject(&t)?;
    let lhs = inner(fs.samples.iter(), t.samples.iter());
    let rhs = inner(random_s.iter(), ft.iter());
    let scale = fs.energy().sqrt() * t.energy().sqrt();
    if scale == 0.0 {
        return Err(Error::Singular);
    }
    Ok((lhs - rhs).norm() / scale)
}
