//! Back-projection operators.
//!
//! Every reconstruction reduces, per voxel, to a list of legs per antenna:
//! a length and a sign (the co-polar sign when the half-wave correction is
//! on, else +1). The leg phasors for one antenna are summed first,
//! `H(k) = Σ s·e^{+jkL}`, and the voxel value is
//! `Σ_k Σ_tx Σ_rx T[tx,rx,k]·H_tx(k)·H_rx(k)`, which equals the sum over
//! every Tx-leg × Rx-leg pair with `e^{jπδ} = s_tx·s_rx`. Radiation data has
//! no Tx factor.

use std::borrow::Cow;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{GridGeometry, ImageGrid};
use crate::error::{Error, Result};
use crate::fields::{wavenumber, ImagingMode, MeasurementSet};
use crate::geometry::{Scene, Vec3};
use crate::propagation::{leg_polarization, PathEngine, PathFinder, PropagationPath};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructionConfig {
    pub max_order: usize,
    pub path_engine: PathEngine,
    #[serde(default = "default_true")]
    pub apply_half_wave: bool,
    pub mode: ImagingMode,
    pub copol: Vec3,
}

fn default_true() -> bool {
    true
}

impl ReconstructionConfig {
    /// Image-method engine, half-wave correction on.
    pub fn new(mode: ImagingMode, copol: Vec3, max_order: usize) -> Self {
        Self {
            max_order,
            path_engine: PathEngine::Images,
            apply_half_wave: true,
            mode,
            copol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if (self.copol.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "copol must be a unit vector, |copol| = {}",
                self.copol.norm()
            )));
        }
        if let PathEngine::Sbr(sbr) = &self.path_engine {
            sbr.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leg {
    pub length: f64,
    pub sign: f64,
}

/// Legs of one voxel grouped per antenna, transmitters first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VoxelLegs {
    offsets: Vec<u32>,
    legs: Vec<Leg>,
}

impl VoxelLegs {
    fn with_capacity(antennas: usize) -> Self {
        let mut offsets = Vec::with_capacity(antennas + 1);
        offsets.push(0);
        Self {
            offsets,
            legs: Vec::with_capacity(antennas),
        }
    }

    fn push_antenna(&mut self, legs: impl IntoIterator<Item = Leg>) {
        self.legs.extend(legs);
        self.offsets.push(self.legs.len() as u32);
    }

    pub fn n_antennas(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn antenna(&self, j: usize) -> &[Leg] {
        &self.legs[self.offsets[j] as usize..self.offsets[j + 1] as usize]
    }

    pub fn total_legs(&self) -> usize {
        self.legs.len()
    }
}

/// Legs that survive the cross-polarization filter.
pub fn legs_from_paths<'a>(
    paths: &'a [PropagationPath],
    copol: &'a Vec3,
    apply_half_wave: bool,
) -> impl Iterator<Item = Leg> + 'a {
    paths.iter().filter(|p| p.total_length > 0.0).filter_map(move |p| {
        leg_polarization(p, copol, copol).ok().map(|pol| Leg {
            length: p.total_length,
            sign: if apply_half_wave { pol.sign.value() } else { 1.0 },
        })
    })
}

struct Kernel<'a> {
    samples: Cow<'a, [Complex64]>,
    mode: ImagingMode,
    n_tx: usize,
    n_rx: usize,
    n_k: usize,
    k0: f64,
    dk: f64,
}

struct Scratch {
    h: Vec<Complex64>,
    h_rx: Vec<Complex64>,
    live_rx: Vec<bool>,
    acc: Vec<Complex64>,
}

impl<'a> Kernel<'a> {
    fn new(data: &'a MeasurementSet) -> Result<Self> {
        let (n_tx, n_rx, n_k) = data.samples.dim();
        if n_tx == 0 || n_rx == 0 || n_k == 0 {
            return Err(Error::EmptyInput("measurement set"));
        }
        if data.mode == ImagingMode::Scattering && data.tx_positions.len() != n_tx {
            return Err(Error::ShapeMismatch("tx axis does not match tx positions".into()));
        }
        if data.rx_positions.len() != n_rx || data.sweep.count() != n_k {
            return Err(Error::ShapeMismatch("sample tensor does not match its axes".into()));
        }
        let samples = match data.samples.as_slice() {
            Some(s) => Cow::Borrowed(s),
            None => Cow::Owned(data.samples.iter().copied().collect()),
        };
        Ok(Self {
            samples,
            mode: data.mode,
            n_tx,
            n_rx,
            n_k,
            k0: wavenumber(data.sweep.f_start),
            dk: wavenumber(data.sweep.step),
        })
    }

    fn tx_slots(&self) -> usize {
        match self.mode {
            ImagingMode::Radiation => 0,
            ImagingMode::Scattering => self.n_tx,
        }
    }

    fn scratch(&self) -> Scratch {
        let rx_buf = if self.mode == ImagingMode::Scattering {
            self.n_rx * self.n_k
        } else {
            0
        };
        Scratch {
            h: vec![Complex64::new(0.0, 0.0); self.n_k],
            h_rx: vec![Complex64::new(0.0, 0.0); rx_buf],
            live_rx: vec![false; self.n_rx],
            acc: vec![Complex64::new(0.0, 0.0); self.n_k],
        }
    }

    /// `out[i] = Σ s·e^{+j k_i L}` over `legs`.
    fn phasor_sum(&self, legs: &[Leg], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        for leg in legs {
            let mut z = Complex64::cis(self.k0 * leg.length) * leg.sign;
            let step = Complex64::cis(self.dk * leg.length);
            for o in out.iter_mut() {
                *o += z;
                z *= step;
            }
        }
    }

    fn row(&self, tx: usize, rx: usize) -> &[Complex64] {
        let start = (tx * self.n_rx + rx) * self.n_k;
        &self.samples[start..start + self.n_k]
    }

    fn evaluate(&self, legs: &VoxelLegs, s: &mut Scratch) -> Complex64 {
        debug_assert_eq!(legs.n_antennas(), self.tx_slots() + self.n_rx);
        let mut total = Complex64::new(0.0, 0.0);
        let rx0 = self.tx_slots();
        match self.mode {
            ImagingMode::Radiation => {
                for rx in 0..self.n_rx {
                    let l = legs.antenna(rx0 + rx);
                    if l.is_empty() {
                        continue;
                    }
                    self.phasor_sum(l, &mut s.h);
                    for (t, h) in self.row(0, rx).iter().zip(&s.h) {
                        total += t * h;
                    }
                }
            }
            ImagingMode::Scattering => {
                let n_k = self.n_k;
                for rx in 0..self.n_rx {
                    let l = legs.antenna(rx0 + rx);
                    s.live_rx[rx] = !l.is_empty();
                    if s.live_rx[rx] {
                        self.phasor_sum(l, &mut s.h_rx[rx * n_k..(rx + 1) * n_k]);
                    }
                }
                for tx in 0..self.n_tx {
                    let l = legs.antenna(tx);
                    if l.is_empty() {
                        continue;
                    }
                    s.acc.fill(Complex64::new(0.0, 0.0));
                    for rx in 0..self.n_rx {
                        if !s.live_rx[rx] {
                            continue;
                        }
                        let h_rx = &s.h_rx[rx * n_k..(rx + 1) * n_k];
                        for ((a, t), h) in s.acc.iter_mut().zip(self.row(tx, rx)).zip(h_rx) {
                            *a += t * h;
                        }
                    }
                    self.phasor_sum(l, &mut s.h);
                    for (a, h) in s.acc.iter().zip(&s.h) {
                        total += a * h;
                    }
                }
            }
        }
        total
    }
}

/// Antennas queried per voxel, in slot order.
fn slot_antennas(data: &MeasurementSet) -> Vec<Vec3> {
    match data.mode {
        ImagingMode::Radiation => data.rx_positions.clone(),
        ImagingMode::Scattering => data.tx_positions.iter().chain(&data.rx_positions).copied().collect(),
    }
}

fn naive_legs(point: &Vec3, antennas: &[Vec3]) -> VoxelLegs {
    let mut v = VoxelLegs::with_capacity(antennas.len());
    for a in antennas {
        v.push_antenna([Leg {
            length: (a - point).norm(),
            sign: 1.0,
        }]);
    }
    v
}

fn traced_legs(
    finder: &PathFinder<'_>,
    point: &Vec3,
    antennas: &[Vec3],
    cfg: &ReconstructionConfig,
) -> Result<VoxelLegs> {
    let mut v = VoxelLegs::with_capacity(antennas.len());
    for paths in finder.paths_to_all(point, antennas)? {
        v.push_antenna(legs_from_paths(&paths, &cfg.copol, cfg.apply_half_wave));
    }
    Ok(v)
}

fn check_mode(data: &MeasurementSet, cfg: &ReconstructionConfig) -> Result<()> {
    cfg.validate()?;
    if data.mode != cfg.mode {
        return Err(Error::ShapeMismatch(format!(
            "data are {:?} but the reconstruction is configured for {:?}",
            data.mode, cfg.mode
        )));
    }
    Ok(())
}

/// Free-space back-projection at arbitrary points.
pub fn naive_bpa_points(data: &MeasurementSet, points: &[Vec3]) -> Result<Vec<Complex64>> {
    let kernel = Kernel::new(data)?;
    let antennas = slot_antennas(data);
    Ok(points
        .par_iter()
        .map_init(
            || kernel.scratch(),
            |s, p| kernel.evaluate(&naive_legs(p, &antennas), s),
        )
        .collect())
}

pub fn naive_bpa(data: &MeasurementSet, grid: &GridGeometry) -> Result<ImageGrid> {
    grid.validate()?;
    let values = naive_bpa_points(data, &grid.points())?;
    ImageGrid::from_values(*grid, values)
}

/// Ray-traced back-projection at arbitrary points; paths are found fresh
/// for every point.
pub fn rt_bpa_points(
    data: &MeasurementSet,
    points: &[Vec3],
    scene: &Scene,
    cfg: &ReconstructionConfig,
) -> Result<Vec<Complex64>> {
    check_mode(data, cfg)?;
    let kernel = Kernel::new(data)?;
    let finder = cfg.path_engine.prepare(scene, cfg.max_order)?;
    let antennas = slot_antennas(data);
    points
        .par_iter()
        .map_init(
            || kernel.scratch(),
            |s, p| Ok(kernel.evaluate(&traced_legs(&finder, p, &antennas, cfg)?, s)),
        )
        .collect()
}

pub fn rt_bpa(
    data: &MeasurementSet,
    grid: &GridGeometry,
    scene: &Scene,
    cfg: &ReconstructionConfig,
) -> Result<ImageGrid> {
    grid.validate()?;
    let values = rt_bpa_points(data, &grid.points(), scene, cfg)?;
    ImageGrid::from_values(*grid, values)
}

/// Precomputed legs for every voxel of a grid, reusable across data sets
/// that share the grid, antennas and configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTable {
    geometry: GridGeometry,
    antennas: Vec<Vec3>,
    mode: ImagingMode,
    voxels: Vec<VoxelLegs>,
}

impl PathTable {
    pub fn build(
        data: &MeasurementSet,
        grid: &GridGeometry,
        scene: &Scene,
        cfg: &ReconstructionConfig,
    ) -> Result<Self> {
        check_mode(data, cfg)?;
        grid.validate()?;
        let finder = cfg.path_engine.prepare(scene, cfg.max_order)?;
        let antennas = slot_antennas(data);
        let voxels = grid
            .points()
            .par_iter()
            .map(|p| traced_legs(&finder, p, &antennas, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            geometry: *grid,
            antennas,
            mode: data.mode,
            voxels,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn voxel(&self, idx: usize) -> &VoxelLegs {
        &self.voxels[idx]
    }

    pub fn total_legs(&self) -> usize {
        self.voxels.iter().map(VoxelLegs::total_legs).sum()
    }

    /// Back-projects `data` through the cached legs.
    pub fn reconstruct(&self, data: &MeasurementSet) -> Result<ImageGrid> {
        if data.mode != self.mode || slot_antennas(data) != self.antennas {
            return Err(Error::ShapeMismatch(
                "data antennas differ from the path table's".into(),
            ));
        }
        let kernel = Kernel::new(data)?;
        let values = self
            .voxels
            .par_iter()
            .map_init(|| kernel.scratch(), |s, v| kernel.evaluate(v, s))
            .collect();
        ImageGrid::from_values(self.geometry, values)
    }
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T, F>(workers: usize, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
