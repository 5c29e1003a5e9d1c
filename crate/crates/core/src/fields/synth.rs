//! Forward models: multipath measurement data from known sources or targets.

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rayon::prelude::*;

use super::dipole::{dipole_field, AmplitudeMode, DipoleSource};
use super::measurement::{AntennaArray, FrequencySweep, ImagingMode, MeasurementSet, PointScatterer};
use crate::error::{Error, Result};
use crate::geometry::{Scene, Vec3};
use crate::propagation::{leg_polarization, pec_reflect, PathEngine, PathFinder, PropagationPath};

/// Received co-polar field of one leg for each wavenumber, written into
/// `out` (added). The dipole sits at `endpoint_a` with unit `orientation`.
///
/// Phase-only legs carry the co-polar sign and `e^{−jkL}`; cross-polarized
/// legs contribute nothing in that mode. Far-field legs carry
/// `sin θ · (ê·c) / L`. Full legs evaluate the complete dipole field of the
/// image source seen from the antenna.
pub fn add_leg_response(
    path: &PropagationPath,
    orientation: &Vec3,
    copol: &Vec3,
    wavenumbers: &[f64],
    mode: AmplitudeMode,
    weight: Complex64,
    out: &mut [Complex64],
) -> Result<()> {
    let l = path.total_length;
    match mode {
        AmplitudeMode::PhaseOnly => {
            let Ok(pol) = leg_polarization(path, orientation, copol) else {
                return Ok(());
            };
            let w = weight * pol.sign.value();
            for (o, k) in out.iter_mut().zip(wavenumbers) {
                *o += w * Complex64::cis(-k * l);
            }
        }
        AmplitudeMode::FarField => {
            let d0 = path.first_direction();
            let transverse = orientation - orientation.dot(&d0) * d0;
            let e = path.normals.iter().fold(transverse, |e, n| pec_reflect(&e, n));
            let w = weight * (e.dot(copol) / l);
            for (o, k) in out.iter_mut().zip(wavenumbers) {
                *o += w * Complex64::cis(-k * l);
            }
        }
        AmplitudeMode::Full => {
            let moment = path.normals.iter().fold(*orientation, |p, n| pec_reflect(&p, n));
            let image = DipoleSource {
                position: path.unfolded_source(),
                orientation: moment,
                amplitude: weight,
            };
            for (o, k) in out.iter_mut().zip(wavenumbers) {
                let e = dipole_field(&path.endpoint_b, &image, *k, AmplitudeMode::Full)?;
                *o += e[0] * copol.x + e[1] * copol.y + e[2] * copol.z;
            }
        }
    }
    Ok(())
}

/// `[antenna, k]` responses of every path from `point` to each antenna.
#[allow(clippy::too_many_arguments)]
fn antenna_responses(
    finder: &PathFinder<'_>,
    point: &Vec3,
    orientation: &Vec3,
    antennas: &[Vec3],
    copol: &Vec3,
    wavenumbers: &[f64],
    mode: AmplitudeMode,
    weight: Complex64,
) -> Result<Array2<Complex64>> {
    let mut out = Array2::zeros((antennas.len(), wavenumbers.len()));
    let paths = finder.paths_to_all(point, antennas)?;
    for (j, legs) in paths.iter().enumerate() {
        let mut row = out.row_mut(j);
        let row = row.as_slice_mut().expect("row-major");
        for path in legs {
            add_leg_response(path, orientation, copol, wavenumbers, mode, weight, row)?;
        }
    }
    Ok(out)
}

/// Radiation-mode data `T[0, rx, k]` from a set of dipoles.
pub fn synthesize_radiation_data(
    sources: &[DipoleSource],
    array: &AntennaArray,
    scene: &Scene,
    sweep: &FrequencySweep,
    engine: &PathEngine,
    max_order: usize,
    mode: AmplitudeMode,
) -> Result<MeasurementSet> {
    if sources.is_empty() {
        return Err(Error::EmptyInput("sources"));
    }
    if array.rx_positions.is_empty() {
        return Err(Error::EmptyInput("receivers"));
    }
    sweep.validate()?;
    let finder = engine.prepare(scene, max_order)?;
    let ks = sweep.wavenumbers();
    let parts = sources
        .par_iter()
        .map(|s| {
            antenna_responses(
                &finder,
                &s.position,
                &s.orientation,
                &array.rx_positions,
                &array.copol,
                &ks,
                mode,
                s.amplitude,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut data = MeasurementSet::zeros(ImagingMode::Radiation, array, *sweep)?;
    let mut slab = data.samples.index_axis_mut(ndarray::Axis(0), 0);
    for p in parts {
        slab += &p;
    }
    Ok(data)
}

/// Scattering-mode data `T[tx, rx, k] = Σ ρ G_tx G_rx`, where each leg is
/// radiated by a copol-oriented source at the target.
pub fn synthesize_scattering_data(
    targets: &[PointScatterer],
    array: &AntennaArray,
    scene: &Scene,
    sweep: &FrequencySweep,
    engine: &PathEngine,
    max_order: usize,
    mode: AmplitudeMode,
) -> Result<MeasurementSet> {
    if targets.is_empty() {
        return Err(Error::EmptyInput("targets"));
    }
    if array.tx_positions.is_empty() {
        return Err(Error::EmptyInput("transmitters"));
    }
    if array.rx_positions.is_empty() {
        return Err(Error::EmptyInput("receivers"));
    }
    sweep.validate()?;
    let finder = engine.prepare(scene, max_order)?;
    let ks = sweep.wavenumbers();
    let c = array.copol;
    let one = Complex64::new(1.0, 0.0);
    let parts = targets
        .par_iter()
        .map(|t| -> Result<Array3<Complex64>> {
            let g_tx = antenna_responses(&finder, &t.position, &c, &array.tx_positions, &c, &ks, mode, one)?;
            let g_rx = antenna_responses(&finder, &t.position, &c, &array.rx_positions, &c, &ks, mode, one)?;
            let mut part = Array3::zeros((array.tx_positions.len(), array.rx_positions.len(), ks.len()));
            for ((a, b, k), v) in part.indexed_iter_mut() {
                *v = t.reflectivity * g_tx[(a, k)] * g_rx[(b, k)];
            }
            Ok(part)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut data = MeasurementSet::zeros(ImagingMode::Scattering, array, *sweep)?;
    for p in parts {
        data.samples += &p;
    }
    Ok(data)
}
