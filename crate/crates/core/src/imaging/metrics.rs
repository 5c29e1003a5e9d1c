use serde::{Deserialize, Serialize};

use super::grid::ImageGrid;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Magnitude floor, relative to the image maximum, below which sidelobes are
/// ignored (−40 dB).
pub const SIDELOBE_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsfMetrics {
    /// Full width at half maximum of `|s|`, meters.
    pub fwhm: f64,
    /// Peak-to-sidelobe ratio in dB; `+∞` when no sidelobe clears the floor.
    pub pslr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub voxel: [usize; 3],
    pub position: Vec3,
    pub magnitude: f64,
}

fn grid_axis(image: &ImageGrid, axis: &Vec3) -> Result<usize> {
    (0..3)
        .find(|&a| image.geometry.axes[a].dot(axis).abs() > 1.0 - 1e-9)
        .ok_or_else(|| Error::InvalidArgument("axis is not aligned with a grid axis".into()))
}

fn neighbours(dims: [usize; 3], v: [usize; 3]) -> impl Iterator<Item = [usize; 3]> {
    let range = |a: usize| {
        let lo = v[a].saturating_sub(1);
        let hi = (v[a] + 1).min(dims[a] - 1);
        lo..=hi
    };
    let (ri, rj, rl) = (range(0), range(1), range(2));
    ri.flat_map(move |i| {
        let rl = rl.clone();
        rj.clone().flat_map(move |j| rl.clone().map(move |l| [i, j, l]))
    })
    .filter(move |n| *n != v)
}

fn is_local_max(image: &ImageGrid, mags: &[f64], v: [usize; 3]) -> bool {
    let g = &image.geometry;
    let m = mags[g.index(v)];
    neighbours(g.dims, v).all(|n| mags[g.index(n)] <= m)
}

/// Main-lobe width and sidelobe level of `|s|` on the grid line through
/// `peak` along `axis`.
pub fn psf_metrics(image: &ImageGrid, axis: &Vec3, peak: [usize; 3]) -> Result<PsfMetrics> {
    let a = grid_axis(image, axis)?;
    let g = &image.geometry;
    if (0..3).any(|d| peak[d] >= g.dims[d]) {
        return Err(Error::InvalidArgument(format!(
            "peak {peak:?} outside grid {:?}",
            g.dims
        )));
    }
    let mags = image.magnitudes();
    if !is_local_max(image, &mags, peak) {
        return Err(Error::InvalidArgument(format!("voxel {peak:?} is not a local maximum")));
    }
    let top = mags[g.index(peak)];
    if top == 0.0 {
        return Err(Error::EmptyImage);
    }
    let line: Vec<f64> = (0..g.dims[a])
        .map(|i| {
            let mut v = peak;
            v[a] = i;
            mags[g.index(v)] / top
        })
        .collect();
    let p = peak[a];

    let left = (0..p).rev().find(|&i| line[i] < 0.5).ok_or(Error::UnresolvedLobe)?;
    let right = (p + 1..line.len())
        .find(|&i| line[i] < 0.5)
        .ok_or(Error::UnresolvedLobe)?;
    let cross = |inside: usize, outside: usize| {
        let (vi, vo) = (line[inside], line[outside]);
        inside as f64 + (outside as f64 - inside as f64) * (vi - 0.5) / (vi - vo)
    };
    let fwhm = (cross(right - 1, right) - cross(left + 1, left)) * g.spacing[a];

    let mut lo = p;
    while lo > 0 && line[lo - 1] <= line[lo] {
        lo -= 1;
    }
    let mut hi = p;
    while hi + 1 < line.len() && line[hi + 1] <= line[hi] {
        hi += 1;
    }
    let sidelobe = line[..lo].iter().chain(&line[hi + 1..]).copied().fold(0.0, f64::max);
    let pslr_db = if sidelobe < SIDELOBE_FLOOR {
        f64::INFINITY
    } else {
        -20.0 * sidelobe.log10()
    };
    Ok(PsfMetrics { fwhm, pslr_db })
}

/// Up to `n` local maxima of `|s|`, strongest first, each at least
/// `min_separation` meters from every stronger one kept. Zero voxels are
/// never peaks.
pub fn peak_locations(image: &ImageGrid, n: usize, min_separation: f64) -> Vec<Peak> {
    let g = &image.geometry;
    let mags = image.magnitudes();
    let mut candidates: Vec<usize> = (0..mags.len())
        .filter(|&i| mags[i] > 0.0 && is_local_max(image, &mags, g.coords(i)))
        .collect();
    candidates.sort_by(|&x, &y| mags[y].total_cmp(&mags[x]).then(x.cmp(&y)));
    let mut out: Vec<Peak> = Vec::new();
    for idx in candidates {
        if out.len() >= n {
            break;
        }
        let voxel = g.coords(idx);
        let position = g.voxel_center(voxel);
        if out.iter().all(|p| (p.position - position).norm() >= min_separation) {
            out.push(Peak {
                voxel,
                position,
                magnitude: mags[idx],
            });
        }
    }
    out
}

/// Shannon entropy (nats) of `|s|² / Σ|s|²`.
pub fn image_entropy(image: &ImageGrid) -> Result<f64> {
    let total: f64 = image.values.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::EmptyImage);
    }
    Ok(image
        .values
        .iter()
        .map(|v| v.norm_sqr() / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum())
}
