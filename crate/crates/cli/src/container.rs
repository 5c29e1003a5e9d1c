//! `RTBPA1` binary container for measurement sets and complex images.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic      6 bytes  "RTBPA1"
//! kind       u8       1 = measurement, 2 = image
//! measurement:
//!   mode     u8       0 = radiation, 1 = scattering
//!   dims     3 × u32  n_tx, n_rx, n_k
//!   n_txpos  u32      transmitter table length (0 in radiation mode)
//!   tx       n_txpos × 3 f64
//!   rx       n_rx × 3 f64
//!   copol    3 f64
//!   sweep    3 f64    f_start, f_stop, step (Hz)
//!   freqs    n_k f64
//! image:
//!   dims     3 × u32
//!   origin   3 f64
//!   axes     9 f64    three unit vectors
//!   spacing  3 f64
//! samples    (re f64, im f64), row-major over dims
//! ```

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use ndarray::Array3;
use num_complex::Complex64;
use rtbpa_core::fields::{FrequencySweep, ImagingMode, MeasurementSet};
use rtbpa_core::geometry::Vec3;
use rtbpa_core::imaging::{GridGeometry, ImageGrid};

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 6] = b"RTBPA1";
const KIND_MEASUREMENT: u8 = 1;
const KIND_IMAGE: u8 = 2;

/// Upper bound on any stored dimension, to reject garbage headers before
/// allocating.
const MAX_DIM: u32 = 1 << 24;

fn put_vec(w: &mut impl Write, v: &Vec3) -> std::io::Result<()> {
    for c in v.iter() {
        w.write_f64::<LE>(*c)?;
    }
    Ok(())
}

fn get_vec(r: &mut impl Read) -> std::io::Result<Vec3> {
    Ok(Vec3::new(r.read_f64::<LE>()?, r.read_f64::<LE>()?, r.read_f64::<LE>()?))
}

fn put_samples<'a>(w: &mut impl Write, s: impl Iterator<Item = &'a Complex64>) -> std::io::Result<()> {
    for c in s {
        w.write_f64::<LE>(c.re)?;
        w.write_f64::<LE>(c.im)?;
    }
    Ok(())
}

fn get_samples(r: &mut impl Read, n: usize) -> std::io::Result<Vec<Complex64>> {
    (0..n)
        .map(|_| Ok(Complex64::new(r.read_f64::<LE>()?, r.read_f64::<LE>()?)))
        .collect()
}

fn get_dim(r: &mut impl Read) -> std::io::Result<usize> {
    let d = r.read_u32::<LE>()?;
    if d > MAX_DIM {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("dimension {d} out of range"),
        ));
    }
    Ok(d as usize)
}

fn header(r: &mut impl Read, want: u8) -> std::io::Result<()> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "not an RTBPA1 file",
        ));
    }
    let kind = r.read_u8()?;
    if kind != want {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("container kind {kind}, expected {want}"),
        ));
    }
    Ok(())
}

fn expect_end(r: &mut impl Read) -> std::io::Result<()> {
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "trailing bytes"));
    }
    Ok(())
}

pub fn encode_measurement(data: &MeasurementSet) -> Vec<u8> {
    let mut w = Vec::new();
    let (n_tx, n_rx, n_k) = data.samples.dim();
    (|| -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_u8(KIND_MEASUREMENT)?;
        w.write_u8(match data.mode {
            ImagingMode::Radiation => 0,
            ImagingMode::Scattering => 1,
        })?;
        for d in [n_tx, n_rx, n_k] {
            w.write_u32::<LE>(d as u32)?;
        }
        w.write_u32::<LE>(data.tx_positions.len() as u32)?;
        for p in data.tx_positions.iter().chain(&data.rx_positions) {
            put_vec(&mut w, p)?;
        }
        put_vec(&mut w, &data.copol)?;
        for v in [data.sweep.f_start, data.sweep.f_stop, data.sweep.step] {
            w.write_f64::<LE>(v)?;
        }
        for f in data.sweep.frequencies() {
            w.write_f64::<LE>(f)?;
        }
        put_samples(&mut w, data.samples.iter())
    })()
    .expect("writing to a Vec cannot fail");
    w
}

pub fn decode_measurement(mut r: impl Read) -> std::io::Result<std::result::Result<MeasurementSet, rtbpa_core::Error>> {
    header(&mut r, KIND_MEASUREMENT)?;
    let mode = match r.read_u8()? {
        0 => ImagingMode::Radiation,
        1 => ImagingMode::Scattering,
        m => {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("mode byte {m}"),
            ))
        }
    };
    let (n_tx, n_rx, n_k) = (get_dim(&mut r)?, get_dim(&mut r)?, get_dim(&mut r)?);
    let n_txpos = get_dim(&mut r)?;
    let tx = (0..n_txpos)
        .map(|_| get_vec(&mut r))
        .collect::<std::io::Result<Vec<_>>>()?;
    let rx = (0..n_rx)
        .map(|_| get_vec(&mut r))
        .collect::<std::io::Result<Vec<_>>>()?;
    let copol = get_vec(&mut r)?;
    let sweep = FrequencySweep {
        f_start: r.read_f64::<LE>()?,
        f_stop: r.read_f64::<LE>()?,
        step: r.read_f64::<LE>()?,
    };
    for _ in 0..n_k {
        r.read_f64::<LE>()?;
    }
    let samples = get_samples(&mut r, n_tx * n_rx * n_k)?;
    expect_end(&mut r)?;
    let samples = Array3::from_shape_vec((n_tx, n_rx, n_k), samples).expect("length matches dims");
    Ok(MeasurementSet::new(mode, tx, rx, copol, sweep, samples))
}

pub fn encode_image(img: &ImageGrid) -> Vec<u8> {
    let g = &img.geometry;
    let mut w = Vec::new();
    (|| -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_u8(KIND_IMAGE)?;
        for d in g.dims {
            w.write_u32::<LE>(d as u32)?;
        }
        put_vec(&mut w, &g.origin)?;
        for a in &g.axes {
            put_vec(&mut w, a)?;
        }
        for s in g.spacing {
            w.write_f64::<LE>(s)?;
        }
        put_samples(&mut w, img.values.iter())
    })()
    .expect("writing to a Vec cannot fail");
    w
}

pub fn decode_image(mut r: impl Read) -> std::io::Result<std::result::Result<ImageGrid, rtbpa_core::Error>> {
    header(&mut r, KIND_IMAGE)?;
    let dims = [get_dim(&mut r)?, get_dim(&mut r)?, get_dim(&mut r)?];
    let origin = get_vec(&mut r)?;
    let axes = [get_vec(&mut r)?, get_vec(&mut r)?, get_vec(&mut r)?];
    let spacing = [r.read_f64::<LE>()?, r.read_f64::<LE>()?, r.read_f64::<LE>()?];
    let values = get_samples(&mut r, dims.iter().product())?;
    expect_end(&mut r)?;
    Ok(GridGeometry::new(origin, axes, spacing, dims).and_then(|g| ImageGrid::from_values(g, values)))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::writing(path, e))
}

pub fn read_measurement(path: &Path) -> Result<MeasurementSet> {
    let f = std::fs::File::open(path).map_err(|e| CliError::reading(path, e))?;
    let decoded = decode_measurement(std::io::BufReader::new(f)).map_err(|e| CliError::reading(path, e))?;
    decoded.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_image(path: &Path) -> Result<ImageGrid> {
    let f = std::fs::File::open(path).map_err(|e| CliError::reading(path, e))?;
    let decoded = decode_image(std::io::BufReader::new(f)).map_err(|e| CliError::reading(path, e))?;
    decoded.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}
