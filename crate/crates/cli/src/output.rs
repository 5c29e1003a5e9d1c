//! Image artifacts: dB CSV cuts, grayscale heatmaps and the metrics report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use image::{GrayImage, Luma};
use rtbpa_core::geometry::Vec3;
use rtbpa_core::imaging::{image_entropy, peak_locations, psf_metrics, ImageGrid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Lower end of every dB rendering.
pub const DB_FLOOR: f64 = -40.0;

/// `|s|` in dB relative to the image maximum, one matrix per `l` slice:
/// rows are the second grid axis (index 0 first), columns the first.
pub fn db_csv(img: &ImageGrid, slice: usize) -> String {
    let db = img.normalized_db(DB_FLOOR);
    let [nx, ny, _] = img.dims();
    let mut out = String::new();
    for j in 0..ny {
        for i in 0..nx {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{:.4}", db[img.geometry.index([i, j, slice])]).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Grayscale ramp: −40 dB (or below) is black, 0 dB white, linear in dB.
/// The second grid axis points up.
pub fn heatmap(img: &ImageGrid, slice: usize) -> GrayImage {
    let db = img.normalized_db(DB_FLOOR);
    let [nx, ny, _] = img.dims();
    GrayImage::from_fn(nx as u32, ny as u32, |x, y| {
        let j = ny - 1 - y as usize;
        let v = db[img.geometry.index([x as usize, j, slice])];
        Luma([(255.0 * (v - DB_FLOOR) / -DB_FLOOR).round().clamp(0.0, 255.0) as u8])
    })
}

/// Writes `image_db[_zL].csv` and `image[_zL].png` for every slice.
pub fn write_cuts(img: &ImageGrid, dir: &Path) -> Result<Vec<PathBuf>> {
    let slices = img.dims()[2];
    let mut written = Vec::new();
    for l in 0..slices {
        let suffix = if slices == 1 { String::new() } else { format!("_z{l}") };
        let csv = dir.join(format!("image_db{suffix}.csv"));
        std::fs::write(&csv, db_csv(img, l)).map_err(|e| CliError::writing(&csv, e))?;
        let png = dir.join(format!("image{suffix}.png"));
        heatmap(img, l)
            .save_with_format(&png, image::ImageFormat::Png)
            .map_err(|e| CliError::writing(&png, e))?;
        written.extend([csv, png]);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub voxel: [usize; 3],
    pub position: Vec3,
    /// Relative to the strongest voxel.
    pub level_db: f64,
}

/// Width and sidelobe level along one grid axis through the main peak.
/// `None` where the lobe is unresolved or no sidelobe clears −40 dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisReport {
    pub fwhm: Option<f64>,
    pub pslr_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub algorithm: String,
    pub scenario: String,
    pub dims: [usize; 3],
    pub peaks: Vec<PeakReport>,
    /// Keyed by grid axis, `x`/`y`/`z`; axes of length one are left out.
    pub axes: std::collections::BTreeMap<String, AxisReport>,
    pub entropy: f64,
    pub wall_clock_seconds: f64,
}

pub fn metrics(
    img: &ImageGrid,
    algorithm: &str,
    scenario: &str,
    n_peaks: usize,
    min_separation: f64,
    wall_clock_seconds: f64,
) -> Result<Metrics> {
    let top = img.max_abs();
    if top == 0.0 {
        return Err(CliError::Numeric("reconstructed image is identically zero".into()));
    }
    let peaks: Vec<PeakReport> = peak_locations(img, n_peaks, min_separation)
        .into_iter()
        .map(|p| PeakReport {
            voxel: p.voxel,
            position: p.position,
            level_db: 20.0 * (p.magnitude / top).log10(),
        })
        .collect();
    let main = img.peak_voxel();
    let mut axes = std::collections::BTreeMap::new();
    for (a, name) in ["x", "y", "z"].iter().enumerate() {
        if img.dims()[a] < 2 {
            continue;
        }
        let report = match psf_metrics(img, &img.geometry.axes[a], main) {
            Ok(m) => AxisReport {
                fwhm: Some(m.fwhm),
                pslr_db: m.pslr_db.is_finite().then_some(m.pslr_db),
            },
            Err(_) => AxisReport {
                fwhm: None,
                pslr_db: None,
            },
        };
        axes.insert(name.to_string(), report);
    }
    Ok(Metrics {
        algorithm: algorithm.into(),
        scenario: scenario.into(),
        dims: img.dims(),
        peaks,
        axes,
        entropy: image_entropy(img)?,
        wall_clock_seconds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisDelta {
    pub fwhm: Option<f64>,
    pub pslr_db: Option<f64>,
}

/// `B − A` for every metric both runs report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub run_a: String,
    pub run_b: String,
    pub entropy_delta: f64,
    pub axes: std::collections::BTreeMap<String, AxisDelta>,
    /// Distance between the i-th peaks of the two runs, meters.
    pub peak_displacements: Vec<f64>,
    /// Change of the strongest voxel, dB.
    pub max_level_delta_db: f64,
}

pub fn compare(a: &Metrics, img_a: &ImageGrid, b: &Metrics, img_b: &ImageGrid, names: (&str, &str)) -> CompareReport {
    let diff = |x: Option<f64>, y: Option<f64>| x.zip(y).map(|(x, y)| y - x);
    let axes = a
        .axes
        .iter()
        .filter_map(|(k, ra)| {
            b.axes.get(k).map(|rb| {
                (
                    k.clone(),
                    AxisDelta {
                        fwhm: diff(ra.fwhm, rb.fwhm),
                        pslr_db: diff(ra.pslr_db, rb.pslr_db),
                    },
                )
            })
        })
        .collect();
    CompareReport {
        run_a: names.0.into(),
        run_b: names.1.into(),
        entropy_delta: b.entropy - a.entropy,
        axes,
        peak_displacements: a
            .peaks
            .iter()
            .zip(&b.peaks)
            .map(|(p, q)| (p.position - q.position).norm())
            .collect(),
        max_level_delta_db: 20.0 * (img_b.max_abs() / img_a.max_abs()).log10(),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::writing(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::reading(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}
