use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rtbpa_core::fields::{AmplitudeMode, ImagingMode, MeasurementSet};
use rtbpa_core::imaging::{naive_bpa, rt_bpa, with_workers, GridGeometry, ReconstructionConfig};
use rtbpa_core::propagation::{PathEngine, SbrConfig};
use rtbpa_core::scenes::{builtin, load_scenario, Scenario, BUILTIN_NAMES};
use serde::{Deserialize, Serialize};

use crate::args::{
    Algorithm, Amplitude, Cli, Command, CompareArgs, EngineArgs, EngineKind, ForwardArgs, ReconstructArgs,
    ScenesCommand,
};
use crate::container::{encode_image, encode_measurement, read_image, read_measurement, write_file};
use crate::error::{CliError, Result};
use crate::output::{compare, metrics, read_json, write_cuts, write_json, Metrics};

pub const MEASUREMENT_FILE: &str = "measurement.rtbpa";
pub const IMAGE_FILE: &str = "image.rtbpa";
pub const METRICS_FILE: &str = "metrics.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything that determines a run's outputs; written next to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario: String,
    pub engine: PathEngine,
    pub max_order: usize,
    pub apply_half_wave: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<AmplitudeMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    pub grid: [usize; 3],
    pub out: PathBuf,
    pub rng_seed: u64,
}

pub fn run(cli: Cli, out: &mut (impl Write + Send)) -> Result<()> {
    match cli.workers {
        Some(0) => Err(CliError::Parse("--workers must be at least 1".into())),
        Some(w) => with_workers(w, || dispatch(cli.command, out))?,
        None => dispatch(cli.command, out),
    }
}

fn dispatch(command: Command, out: &mut (impl Write + Send)) -> Result<()> {
    match command {
        Command::Forward(a) => cmd_forward(&a, out),
        Command::Reconstruct(a) => cmd_reconstruct(&a, out),
        Command::Compare(a) => cmd_compare(&a, out),
        Command::Scenes(c) => cmd_scenes(&c, out),
    }
}

fn say(out: &mut impl Write, text: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(text).map_err(|e| CliError::Io(e.to_string()))
}

/// A built-in name, else a scenario file.
pub fn resolve_scenario(reference: &str) -> Result<Scenario> {
    if let Some(s) = builtin(reference) {
        return Ok(s?);
    }
    let path = Path::new(reference);
    if !path.is_file() {
        return Err(CliError::Unknown(format!(
            "'{reference}' is neither a built-in scenario ({}) nor a file",
            BUILTIN_NAMES.join(", ")
        )));
    }
    Ok(load_scenario(path)?)
}

fn path_engine(a: &EngineArgs, max_order: usize) -> PathEngine {
    match a.engine {
        EngineKind::Images => PathEngine::Images,
        EngineKind::Sbr => PathEngine::Sbr(SbrConfig {
            ray_count: a.rays,
            max_bounces: max_order,
            capture_radius: a.capture_radius,
            rng_seed: a.seed,
            refine: true,
        }),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::writing(dir, e))
}

fn mode_name(mode: ImagingMode) -> &'static str {
    match mode {
        ImagingMode::Radiation => "radiation",
        ImagingMode::Scattering => "scattering",
    }
}

/// Plain `key = value` description of a measurement file.
pub fn sidecar(data: &MeasurementSet, manifest: &RunManifest) -> String {
    let (n_tx, n_rx, n_k) = data.samples.dim();
    let v = |p: &rtbpa_core::geometry::Vec3| format!("{:?} {:?} {:?}", p.x, p.y, p.z);
    let mut lines = vec![
        "format = RTBPA1".to_string(),
        "kind = measurement".into(),
        format!("scenario = {}", manifest.scenario),
        format!("mode = {}", mode_name(data.mode)),
        format!("dims = {n_tx} {n_rx} {n_k}"),
        "order = tx rx k".into(),
        "sample = complex, two little-endian f64 (re, im)".into(),
        format!("copol = {}", v(&data.copol)),
        format!("f_start_hz = {:?}", data.sweep.f_start),
        format!("f_stop_hz = {:?}", data.sweep.f_stop),
        format!("f_step_hz = {:?}", data.sweep.step),
        format!(
            "engine = {}",
            serde_json::to_string(&manifest.engine).expect("engine serializes")
        ),
        format!("max_order = {}", manifest.max_order),
        format!("seed = {}", manifest.rng_seed),
    ];
    if let Some(a) = manifest.amplitude {
        lines.push(format!(
            "amplitude = {}",
            serde_json::to_string(&a).expect("mode serializes").trim_matches('"')
        ));
    }
    if let Some(snr) = manifest.snr_db {
        lines.push(format!("snr_db = {snr:?}"));
    }
    lines.push(String::new());
    lines.join("\n")
}

fn cmd_forward(a: &ForwardArgs, out: &mut impl Write) -> Result<()> {
    let sc = resolve_scenario(&a.engine.scenario)?;
    let max_order = a.engine.max_order.unwrap_or(sc.max_order);
    let engine = path_engine(&a.engine, max_order);
    let amplitude = match a.amplitude {
        Amplitude::PhaseOnly => AmplitudeMode::PhaseOnly,
        Amplitude::FarField => AmplitudeMode::FarField,
        Amplitude::Full => AmplitudeMode::Full,
    };
    let mut data = sc.synthesize(&engine, max_order, amplitude)?;
    if let Some(snr) = a.snr {
        let sigma = data.sigma_for_snr(snr);
        data.add_noise(sigma, a.engine.seed)?;
    }
    let manifest = RunManifest {
        command: "forward".into(),
        scenario: a.engine.scenario.clone(),
        engine,
        max_order,
        apply_half_wave: true,
        algorithm: None,
        amplitude: Some(amplitude),
        snr_db: a.snr,
        data: None,
        grid: sc.grid.dims,
        out: a.engine.out.clone(),
        rng_seed: a.engine.seed,
    };
    create_dir(&a.engine.out)?;
    let file = a.engine.out.join(MEASUREMENT_FILE);
    write_file(&file, &encode_measurement(&data))?;
    let meta = a.engine.out.join("measurement.txt");
    std::fs::write(&meta, sidecar(&data, &manifest)).map_err(|e| CliError::writing(&meta, e))?;
    write_json(&a.engine.out.join(MANIFEST_FILE), &manifest)?;
    let (n_tx, n_rx, n_k) = data.samples.dim();
    say(out, format_args!("wrote {} ({n_tx}×{n_rx}×{n_k})\n", file.display()))
}

/// Scenario grid with `nx × ny` voxels in its first two axes, same spacing,
/// same center voxel.
pub fn resize_grid(grid: &GridGeometry, nx: usize, ny: usize) -> Result<GridGeometry> {
    if nx == 0 || ny == 0 {
        return Err(CliError::Parse(format!("--grid needs positive sizes, got {nx} {ny}")));
    }
    let center = grid.voxel_center([grid.dims[0] / 2, grid.dims[1] / 2, 0]);
    let origin = center
        - grid.axes[0] * ((nx / 2) as f64 * grid.spacing[0])
        - grid.axes[1] * ((ny / 2) as f64 * grid.spacing[1]);
    Ok(GridGeometry::new(
        origin,
        grid.axes,
        grid.spacing,
        [nx, ny, grid.dims[2]],
    )?)
}

fn check_data(sc: &Scenario, data: &MeasurementSet) -> Result<()> {
    if data.mode != sc.mode() {
        return Err(CliError::Shape(format!(
            "{} data for a {} scenario",
            mode_name(data.mode),
            mode_name(sc.mode())
        )));
    }
    let tx_ok = data.mode == ImagingMode::Radiation || data.tx_positions == sc.array.tx_positions;
    if !tx_ok || data.rx_positions != sc.array.rx_positions {
        return Err(CliError::Shape("data antennas differ from the scenario's array".into()));
    }
    Ok(())
}

fn cmd_reconstruct(a: &ReconstructArgs, out: &mut impl Write) -> Result<()> {
    let sc = resolve_scenario(&a.engine.scenario)?;
    let data = read_measurement(&a.data)?;
    check_data(&sc, &data)?;
    let grid = match &a.grid {
        Some(g) => resize_grid(&sc.grid, g[0], g[1])?,
        None => sc.grid,
    };
    let max_order = a.engine.max_order.unwrap_or(sc.max_order);
    let engine = path_engine(&a.engine, max_order);
    let cfg = ReconstructionConfig {
        max_order,
        path_engine: engine,
        apply_half_wave: !a.no_half_wave,
        mode: data.mode,
        copol: data.copol,
    };
    let t0 = Instant::now();
    let img = match a.algorithm {
        Algorithm::Naive => naive_bpa(&data, &grid)?,
        Algorithm::Rtbpa => rt_bpa(&data, &grid, sc.scene(), &cfg)?,
    };
    let seconds = t0.elapsed().as_secs_f64();
    let algorithm = match a.algorithm {
        Algorithm::Naive => "naive",
        Algorithm::Rtbpa => "rtbpa",
    };
    let report = metrics(&img, algorithm, &a.engine.scenario, a.peaks, a.min_separation, seconds)?;

    let dir = &a.engine.out;
    create_dir(dir)?;
    write_file(&dir.join(IMAGE_FILE), &encode_image(&img))?;
    write_cuts(&img, dir)?;
    write_json(&dir.join(METRICS_FILE), &report)?;
    let manifest = RunManifest {
        command: "reconstruct".into(),
        scenario: a.engine.scenario.clone(),
        engine,
        max_order,
        apply_half_wave: !a.no_half_wave,
        algorithm: Some(algorithm.into()),
        amplitude: None,
        snr_db: None,
        data: Some(a.data.clone()),
        grid: grid.dims,
        out: dir.clone(),
        rng_seed: a.engine.seed,
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    let peak = &report.peaks[0].position;
    say(
        out,
        format_args!(
            "{algorithm}: peak at ({:.3}, {:.3}, {:.3}) m, entropy {:.3}, {seconds:.2} s -> {}\n",
            peak.x,
            peak.y,
            peak.z,
            report.entropy,
            dir.display()
        ),
    )
}

fn cmd_compare(a: &CompareArgs, out: &mut impl Write) -> Result<()> {
    let load = |dir: &Path| -> Result<_> {
        let m: Metrics = read_json(&dir.join(METRICS_FILE))?;
        let img = read_image(&dir.join(IMAGE_FILE))?;
        Ok((m, img))
    };
    let (ma, ia) = load(&a.run_a)?;
    let (mb, ib) = load(&a.run_b)?;
    if ia.geometry != ib.geometry {
        return Err(CliError::Shape(format!(
            "runs use different grids ({:?} vs {:?})",
            ia.geometry.dims, ib.geometry.dims
        )));
    }
    let names = (a.run_a.display().to_string(), a.run_b.display().to_string());
    let report = compare(&ma, &ia, &mb, &ib, (&names.0, &names.1));
    if let Some(path) = &a.out {
        write_json(path, &report)?;
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    say(out, format_args!("{text}\n"))
}

fn cmd_scenes(c: &ScenesCommand, out: &mut impl Write) -> Result<()> {
    match c {
        ScenesCommand::List => {
            for name in BUILTIN_NAMES {
                let s = builtin(name).expect("listed")?;
                say(
                    out,
                    format_args!(
                        "{name:<24} {:<10} {} rx, {} surfaces, max order {}\n",
                        mode_name(s.mode()),
                        s.array.rx_positions.len(),
                        s.surfaces.len(),
                        s.max_order
                    ),
                )?;
            }
            Ok(())
        }
        ScenesCommand::Show { name } => {
            let s = builtin(name).ok_or_else(|| CliError::Unknown(format!("no built-in scenario '{name}'")))??;
            say(out, format_args!("{}", s.to_json()))
        }
    }
}
