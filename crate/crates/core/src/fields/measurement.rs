use ndarray::Array3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{try_normalize, Vec3};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Uniform stepped-frequency sweep, inclusive of `f_start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySweep {
    pub f_start: f64,
    pub f_stop: f64,
    pub step: f64,
}

impl FrequencySweep {
    pub fn new(f_start: f64, f_stop: f64, step: f64) -> Result<Self> {
        let s = Self { f_start, f_stop, step };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.f_start > 0.0
            && self.f_start.is_finite()
            && self.f_stop.is_finite()
            && self.f_stop >= self.f_start
            && self.step > 0.0
            && self.step.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid sweep: start {} Hz, stop {} Hz, step {} Hz",
                self.f_start, self.f_stop, self.step
            )))
        }
    }

    /// `floor((f_stop − f_start)/step) + 1`, with a relative slack of 1e-9
    /// steps so that 18–20 GHz in 100 MHz steps gives 21 points.
    pub fn count(&self) -> usize {
        ((self.f_stop - self.f_start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.f_start + i as f64 * self.step
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.count()).map(|i| self.frequency(i)).collect()
    }

    /// `k = 2πf/c` for every sweep point.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.count()).map(|i| wavenumber(self.frequency(i))).collect()
    }
}

pub fn wavenumber(frequency: f64) -> f64 {
    2.0 * std::f64::consts::PI * frequency / SPEED_OF_LIGHT
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImagingMode {
    /// Sources in the image domain radiate; only receivers are used.
    #[default]
    Radiation,
    /// Transmitters illuminate scatterers in the image domain.
    Scattering,
}

/// Antenna positions and the shared linear polarization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaArray {
    pub tx_positions: Vec<Vec3>,
    pub rx_positions: Vec<Vec3>,
    pub copol: Vec3,
}

impl AntennaArray {
    pub fn new(tx_positions: Vec<Vec3>, rx_positions: Vec<Vec3>, copol: Vec3) -> Result<Self> {
        let copol =
            try_normalize(&copol).ok_or_else(|| Error::InvalidArgument("copol vector must be non-zero".into()))?;
        Ok(Self {
            tx_positions,
            rx_positions,
            copol,
        })
    }
}

/// Isotropic point target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointScatterer {
    pub position: Vec3,
    pub reflectivity: Complex64,
}

impl PointScatterer {
    pub fn new(position: Vec3, reflectivity: f64) -> Self {
        Self {
            position,
            reflectivity: Complex64::new(reflectivity, 0.0),
        }
    }
}

/// Complex samples indexed `[tx, rx, k]`. In radiation mode the tx axis has
/// length one and `tx_positions` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub mode: ImagingMode,
    pub tx_positions: Vec<Vec3>,
    pub rx_positions: Vec<Vec3>,
    pub copol: Vec3,
    pub sweep: FrequencySweep,
    pub samples: Array3<Complex64>,
}

impl MeasurementSet {
    pub fn new(
        mode: ImagingMode,
        tx_positions: Vec<Vec3>,
        rx_positions: Vec<Vec3>,
        copol: Vec3,
        sweep: FrequencySweep,
        samples: Array3<Complex64>,
    ) -> Result<Self> {
        sweep.validate()?;
        let n_tx = match mode {
            ImagingMode::Radiation => {
                if !tx_positions.is_empty() {
                    return Err(Error::ShapeMismatch(
                        "radiation-mode data carries no transmitters".into(),
                    ));
                }
                1
            }
            ImagingMode::Scattering => tx_positions.len(),
        };
        let expected = (n_tx, rx_positions.len(), sweep.count());
        if samples.dim() != expected {
            return Err(Error::ShapeMismatch(format!(
                "samples are {:?}, expected {:?} (tx, rx, k)",
                samples.dim(),
                expected
            )));
        }
        let copol =
            try_normalize(&copol).ok_or_else(|| Error::InvalidArgument("copol vector must be non-zero".into()))?;
        Ok(Self {
            mode,
            tx_positions,
            rx_positions,
            copol,
            sweep,
            samples,
        })
    }

    pub fn zeros(mode: ImagingMode, array: &AntennaArray, sweep: FrequencySweep) -> Result<Self> {
        let tx = match mode {
            ImagingMode::Radiation => Vec::new(),
            ImagingMode::Scattering => array.tx_positions.clone(),
        };
        let n_tx = tx.len().max(usize::from(mode == ImagingMode::Radiation));
        let samples = Array3::zeros((n_tx, array.rx_positions.len(), sweep.count()));
        Self::new(mode, tx, array.rx_positions.clone(), array.copol, sweep, samples)
    }

    pub fn n_tx(&self) -> usize {
        self.samples.dim().0
    }

    pub fn n_rx(&self) -> usize {
        self.samples.dim().1
    }

    pub fn n_k(&self) -> usize {
        self.samples.dim().2
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        self.sweep.wavenumbers()
    }

    /// `Σ |T|²`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Adds circular complex Gaussian noise; `sigma` is the per-component
    /// standard deviation.
    pub fn add_noise(&mut self, sigma: f64, seed: u64) -> Result<()> {
        let normal =
            Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(format!("noise sigma {sigma}: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in self.samples.iter_mut() {
            *c += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
        Ok(())
    }

    /// Noise sigma giving the requested SNR in dB relative to mean sample power.
    pub fn sigma_for_snr(&self, snr_db: f64) -> f64 {
        let mean_power = self.energy() / self.samples.len().max(1) as f64;
        (mean_power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt()
    }
}
