//! End-to-end experiment pipeline: scene → data → noise → images → files.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forward::{
    add_noise, approx_scattered, evaluate_scattered, march_density, small_obstacles, StrengthRule,
    WaveRecord, FILTER_GROWTH,
};
use crate::imaging::{
    indicator_i1, indicator_i2tilde, relative_image_difference, ConvolutionMethod, IndicatorImage,
    I1_OVERSHOOT, NEGLIGIBLE,
};
use crate::incident::{incident_on_mesh, Emitter, RETARDED_TOL, SINGULAR_DISTANCE};
use crate::runner::config::{ExperimentConfig, Generator};
use crate::runner::heatmap::{render_heatmap_with, HeatmapStyle, Overlay};
use crate::scene::{
    build_boundary_mesh, make_receivers, surface_inverse_distance_integral, BoundaryMesh,
    MeasurementArray, ReceiverLayout, SamplingGrid, TimeGrid,
};

/// Pixels per grid point in pipeline heatmaps.
pub const HEATMAP_CELL: u32 = 8;
/// Receivers in the refined array used to audit the spherical quadrature
/// identity before 3-D imaging.
pub const AUDIT_RECEIVERS: usize = 20_000;
pub const AUDIT_TOLERANCE: f64 = 1e-2;

/// Everything the forward and imaging stages need, built from the effective
/// (scaled) configuration.
#[derive(Debug, Clone)]
pub struct Scene {
    pub emitter: Emitter,
    pub mesh: BoundaryMesh,
    pub receivers: MeasurementArray,
    pub time_grid: TimeGrid,
    pub sampling_grid: SamplingGrid,
}

impl Scene {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        let eff = cfg.effective();
        let emitter = Emitter::new(eff.trajectory.clone(), eff.signal.clone(), eff.medium)?;
        let meshes = eff
            .scatterers
            .iter()
            .map(|s| build_boundary_mesh(&s.shape, s.resolution()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Scene {
            emitter,
            mesh: BoundaryMesh::combine(meshes)?,
            receivers: make_receivers(&eff.receivers)?,
            time_grid: eff.time_grid,
            sampling_grid: eff.sampling_grid,
        })
    }

    /// Trajectory over the recording window, receivers and true boundaries.
    pub fn overlay(&self, cfg: &ExperimentConfig) -> Overlay {
        let (t0, t1) = self
            .emitter
            .trajectory
            .domain()
            .unwrap_or((0.0, self.time_grid.total_time));
        let trajectory = (0..=512)
            .filter_map(|k| self.emitter.trajectory.position(t0 + (t1 - t0) * k as f64 / 512.0).ok())
            .collect();
        let boundaries = cfg
            .scatterers
            .iter()
            .filter_map(|s| {
                (0..=256)
                    .map(|k| s.shape.curve_point(std::f64::consts::TAU * k as f64 / 256.0))
                    .collect::<Option<Vec<_>>>()
            })
            .collect();
        Overlay {
            trajectory,
            receivers: self.receivers.points.clone(),
            boundaries,
        }
    }
}

/// Clean scattered data plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct ForwardData {
    pub record: WaveRecord,
    pub generator: Generator,
    /// Whether the late-time smoothing filter was applied to the density.
    pub filtered: bool,
    /// Per-component small-obstacle strengths `C = A/E`.
    pub strengths: Vec<f64>,
}

pub fn simulate(scene: &Scene, generator: Generator) -> Result<ForwardData> {
    let strengths = small_obstacles(&scene.mesh, StrengthRule::NearestPanel)
        .iter()
        .map(|o| o.strength)
        .collect();
    let (record, filtered) = match generator {
        Generator::Bie => {
            let inc = incident_on_mesh(&scene.emitter, &scene.mesh, &scene.time_grid)?;
            let density = march_density(&scene.mesh, &inc, &scene.emitter.medium)?;
            let rec = evaluate_scattered(
                &scene.mesh,
                &density,
                &scene.receivers,
                &scene.time_grid,
                &scene.emitter.medium,
            )?;
            (rec, density.filtered)
        }
        Generator::Approx => (
            approx_scattered(&scene.mesh, &scene.emitter, &scene.receivers, &scene.time_grid, true)?,
            false,
        ),
    };
    Ok(ForwardData {
        record,
        generator,
        filtered,
        strengths,
    })
}

/// Largest relative deviation of `Σ Δs/|x - z|` from `4πR` over the grid
/// points inside the sphere, using a refined array of the same radius.
pub fn audit_quadrature(scene: &Scene) -> Result<f64> {
    let radius = scene.receivers.radius;
    let refined = make_receivers(&ReceiverLayout::Sphere {
        radius,
        count: AUDIT_RECEIVERS,
    })?;
    let target = 4.0 * std::f64::consts::PI * radius;
    let mut worst = 0.0f64;
    for z in scene.sampling_grid.points() {
        if z.norm() > radius {
            continue;
        }
        let v = surface_inverse_distance_integral(&refined, &z)?;
        worst = worst.max((v - target).abs() / target);
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub config_hash: String,
    pub record: WaveRecord,
    pub images: Vec<IndicatorImage>,
    pub files: Vec<PathBuf>,
    pub metadata: Value,
}

/// SHA-256 of the compact JSON serialization of the configuration. The
/// output directory is left out: it does not affect any result.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut cfg = cfg.clone();
    cfg.output_dir = None;
    let text = serde_json::to_string(&cfg).expect("configuration serializes");
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    dir: PathBuf,
    hash: String,
    files: Vec<PathBuf>,
    outputs: Vec<Value>,
    timings: serde_json::Map<String, Value>,
    info: serde_json::Map<String, Value>,
}

impl Run<'_> {
    fn timed<T>(&mut self, stage: &'static str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self).map_err(|e| e.in_stage(stage));
        let secs = start.elapsed().as_secs_f64();
        let prev = self.timings.get(stage).and_then(Value::as_f64).unwrap_or(0.0);
        self.timings.insert(stage.into(), json!(prev + secs));
        out
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn emit(&mut self, name: &str, what: &str) {
        self.files.push(self.path(name));
        self.outputs.push(json!({"file": name, "content": what, "config_hash": self.hash}));
    }

    fn write_record(&mut self, name: &str, rec: &WaveRecord) -> Result<()> {
        rec.write_csv(BufWriter::new(File::create(self.path(name))?))?;
        self.emit(name, "record");
        Ok(())
    }

    fn write_image(&mut self, img: &IndicatorImage, overlay: Option<&Overlay>) -> Result<()> {
        let csv = format!("{}.csv", img.kind);
        img.write_csv(BufWriter::new(File::create(self.path(&csv))?))?;
        self.emit(&csv, "image");
        let png = format!("{}.png", img.kind);
        let style = HeatmapStyle {
            cell: HEATMAP_CELL,
            ..HeatmapStyle::default()
        };
        let hash = self.hash.clone();
        let text = [("config-hash", hash.as_str()), ("indicator", &*img.kind.to_string())];
        render_heatmap_with(img, &self.path(&png), style, overlay, &text)?;
        self.emit(&png, "heatmap");
        let peak = img.point(img.argmax());
        self.info.entry("images").or_insert_with(|| json!([]));
        if let Some(Value::Array(list)) = self.info.get_mut("images") {
            list.push(json!({
                "kind": img.kind.to_string(),
                "max": img.max(),
                "argmax": &peak.as_slice()[..img.grid.dim()],
                "zero_probe_points": img.zero_probe.len(),
            }));
        }
        Ok(())
    }

    fn metadata(&self, status: &str) -> Value {
        let eff = self.cfg.effective();
        json!({
            "mowave_run": 1,
            "version": env!("CARGO_PKG_VERSION"),
            "status": status,
            "config_hash": self.hash,
            "config": self.cfg,
            "effective": {
                "time_steps": eff.time_grid.steps,
                "dt": eff.time_grid.dt(),
                "receivers": eff.receivers.count(),
                "resolutions": eff.scatterers.iter().map(|s| s.resolution()).collect::<Vec<_>>(),
            },
            "seed": self.cfg.noise.seed,
            "noise_sigma": self.cfg.noise.sigma,
            "tolerances": {
                "retarded_time": RETARDED_TOL,
                "singular_distance": SINGULAR_DISTANCE,
                "i1_overshoot": I1_OVERSHOOT,
                "negligible_sample": NEGLIGIBLE,
                "filter_growth": FILTER_GROWTH,
                "quadrature_audit": AUDIT_TOLERANCE,
            },
            "results": self.info,
            "outputs": self.outputs,
            "timings_s": self.timings,
        })
    }
}

/// Runs the configured experiment and writes its artifacts to the output
/// directory. On failure the metadata file still records the error.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    let mut run = Run {
        cfg,
        hash: config_hash(cfg),
        dir,
        files: Vec::new(),
        outputs: Vec::new(),
        timings: serde_json::Map::new(),
        info: serde_json::Map::new(),
    };
    let result = stages(&mut run);
    let status = match &result {
        Ok(_) => "ok".to_string(),
        Err(e) => format!("failed: {e}"),
    };
    let metadata = run.metadata(&status);
    let meta_path = run.path("metadata.json");
    fs::write(&meta_path, serde_json::to_string_pretty(&metadata).expect("metadata serializes"))?;
    let (record, images) = result?;
    run.files.push(meta_path);
    Ok(RunOutput {
        dir: run.dir,
        config_hash: run.hash,
        record,
        images,
        files: run.files,
        metadata,
    })
}

fn stages(run: &mut Run<'_>) -> Result<(WaveRecord, Vec<IndicatorImage>)> {
    let cfg = run.cfg;
    let scene = run.timed("scene", |_| Scene::build(cfg))?;
    run.info.insert("panels".into(), json!(scene.mesh.len()));
    run.info.insert("receivers".into(), json!(scene.receivers.len()));

    let fwd = run.timed("forward", |_| simulate(&scene, cfg.generator))?;
    run.info.insert(
        "forward".into(),
        json!({
            "generator": fwd.generator.to_string(),
            "filter_applied": fwd.filtered,
            "strength_constants": fwd.strengths,
        }),
    );

    let noisy = run.timed("noise", |_| add_noise(&fwd.record, &cfg.noise))?;
    run.timed("output", |r| r.write_record("data.csv", &noisy))?;

    if scene.receivers.is_spherical() {
        let worst = run.timed("audit", |_| {
            let worst = audit_quadrature(&scene)?;
            if worst < AUDIT_TOLERANCE {
                Ok(worst)
            } else {
                Err(Error::Geometry(format!(
                    "spherical quadrature identity off by {worst:e} on the sampling grid"
                )))
            }
        })?;
        run.info.insert("quadrature_audit_max_deviation".into(), json!(worst));
    }

    let overlay = (cfg.overlay && scene.sampling_grid.dim() == 2).then(|| scene.overlay(cfg));
    let medium = scene.emitter.medium;
    let mut images = Vec::new();
    if cfg.indicators.wants_i2() {
        let img = run.timed("imaging", |_| {
            indicator_i2tilde(&noisy, &scene.emitter.signal, &medium, &scene.sampling_grid, cfg.convolution)
        })?;
        if cfg.verify_direct {
            let other = match cfg.convolution {
                ConvolutionMethod::Fft => ConvolutionMethod::Direct,
                ConvolutionMethod::Direct => ConvolutionMethod::Fft,
            };
            let check = run.timed("imaging", |_| {
                indicator_i2tilde(&noisy, &scene.emitter.signal, &medium, &scene.sampling_grid, other)
            })?;
            run.info.insert(
                "fft_direct_relative_difference".into(),
                json!(relative_image_difference(&img, &check)),
            );
        }
        run.timed("output", |r| r.write_image(&img, overlay.as_ref()))?;
        images.push(img);
    }
    if cfg.indicators.wants_i1() {
        let img = run.timed("imaging", |_| indicator_i1(&noisy, &scene.emitter, &scene.sampling_grid))?;
        run.timed("output", |r| r.write_image(&img, overlay.as_ref()))?;
        images.push(img);
    }
    Ok((noisy, images))
}

/// Reads an image CSV and writes its heatmap next to it (or to `out`).
pub fn rerender(image_csv: &Path, out: Option<&Path>, cell: u32) -> Result<PathBuf> {
    let file = std::io::BufReader::new(File::open(image_csv)?);
    let img = IndicatorImage::read_csv(file)?;
    let target = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| image_csv.with_extension("png"));
    let style = HeatmapStyle {
        cell,
        ..HeatmapStyle::default()
    };
    render_heatmap_with(&img, &target, style, None, &[])?;
    Ok(target)
}
