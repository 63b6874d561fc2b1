//! Experiment configuration: JSON schema, preset expansion and validation.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::forward::NoiseSpec;
use crate::imaging::ConvolutionMethod;
use crate::runner::presets;
use crate::scene::{
    make_receivers, Medium, ReceiverLayout, SamplingGrid, ShapeSpec, Signal, TimeGrid, Trajectory,
};

/// Number of velocity samples used by the subsonic audit.
pub const AUDIT_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum IndicatorSet {
    I1,
    /// The unweighted `Ĩ₂`.
    I2,
    #[default]
    #[serde(rename = "both")]
    Both,
}

impl IndicatorSet {
    pub fn wants_i1(self) -> bool {
        matches!(self, IndicatorSet::I1 | IndicatorSet::Both)
    }

    pub fn wants_i2(self) -> bool {
        matches!(self, IndicatorSet::I2 | IndicatorSet::Both)
    }
}

impl FromStr for IndicatorSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I1" | "i1" => Ok(IndicatorSet::I1),
            "I2" | "i2" => Ok(IndicatorSet::I2),
            "both" => Ok(IndicatorSet::Both),
            _ => Err(Error::field("indicators", format!("expected I1, I2 or both, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// Marched boundary integral solution.
    #[default]
    Bie,
    /// Small-obstacle approximation.
    Approx,
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bie" => Ok(Generator::Bie),
            "approx" => Ok(Generator::Approx),
            _ => Err(Error::field("generator", format!("expected bie or approx, got {s:?}"))),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Bie => "bie",
            Generator::Approx => "approx",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererSpec {
    pub shape: ShapeSpec,
    /// Segments per curve, sphere subdivision level or cube cells per edge.
    /// Filled from the shape default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<u32>,
    #[serde(default)]
    pub point_like: bool,
}

impl ScattererSpec {
    pub fn new(shape: ShapeSpec, point_like: bool) -> Self {
        let resolution = Some(shape.default_resolution(point_like));
        ScattererSpec {
            shape,
            resolution,
            point_like,
        }
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
            .unwrap_or_else(|| self.shape.default_resolution(self.point_like))
    }

    /// Resolution after a desk-scale factor: curve segments scale linearly,
    /// cube cells with `√s` and sphere levels with `log₄ s`, so panel counts
    /// shrink roughly by `s` in every case.
    pub fn scaled_resolution(&self, s: f64) -> u32 {
        let r = self.resolution();
        if s == 1.0 {
            return r;
        }
        match self.shape {
            ShapeSpec::Sphere { .. } => (r as f64 + (s.ln() / 4f64.ln()).round()).max(1.0) as u32,
            ShapeSpec::Cube { .. } => (r as f64 * s.sqrt()).round().max(1.0) as u32,
            _ => (r as f64 * s).round().max(8.0) as u32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_medium")]
    pub medium: Medium,
    pub trajectory: Trajectory,
    pub signal: Signal,
    pub scatterers: Vec<ScattererSpec>,
    pub receivers: ReceiverLayout,
    pub time_grid: TimeGrid,
    pub sampling_grid: SamplingGrid,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub indicators: IndicatorSet,
    #[serde(default)]
    pub generator: Generator,
    #[serde(default)]
    pub convolution: ConvolutionMethod,
    /// Also evaluate `Ĩ₂` by direct summation and record the discrepancy.
    #[serde(default)]
    pub verify_direct: bool,
    /// Desk-scale factor on time steps, mesh resolution and receiver count.
    #[serde(default = "default_scale")]
    pub scale: f64,
    /// Draw trajectory, receivers and true boundaries on 2-D heatmaps.
    #[serde(default = "default_true")]
    pub overlay: bool,
    /// Defaults to `runs/<name>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_name() -> String {
    "experiment".into()
}

fn default_medium() -> Medium {
    Medium { sound_speed: 340.0 }
}

fn default_scale() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn dim(&self) -> usize {
        self.sampling_grid.dim()
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(&self.name))
    }

    /// Fills every optional field with its default.
    pub fn complete(mut self) -> Self {
        for s in &mut self.scatterers {
            s.resolution = Some(s.resolution());
        }
        if self.output_dir.is_none() {
            self.output_dir = Some(self.output_dir());
        }
        self
    }

    /// The configuration actually simulated: `scale` applied and reset to 1.
    pub fn effective(&self) -> Self {
        let s = self.scale;
        let mut out = self.clone();
        if s != 1.0 {
            out.time_grid.steps = ((self.time_grid.steps as f64 * s).round() as usize).max(1);
            let count = ((self.receivers.count() as f64 * s).round() as usize).max(1);
            out.receivers = self.receivers.with_count(count);
            for (o, spec) in out.scatterers.iter_mut().zip(&self.scatterers) {
                o.resolution = Some(spec.scaled_resolution(s));
            }
        }
        out.scale = 1.0;
        out
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::field("scale", "must be positive"));
        }
        self.medium.validate()?;
        self.trajectory.validate()?;
        self.signal.validate()?;
        self.time_grid.validate()?;
        self.sampling_grid.validate()?;
        self.noise.validate()?;
        make_receivers(&self.receivers)?;
        let dim = self.dim();
        if self.receivers.dim() != dim {
            return Err(Error::field(
                "receivers",
                format!("{}-D layout with a {dim}-D sampling grid", self.receivers.dim()),
            ));
        }
        let traj_dim = match self.trajectory {
            Trajectory::Circle2d { .. } => Some(2),
            Trajectory::Spiral3d { .. } => Some(3),
            _ => None,
        };
        if traj_dim.is_some_and(|d| d != dim) {
            return Err(Error::field("trajectory", format!("does not match the {dim}-D sampling grid")));
        }
        if self.scatterers.is_empty() {
            return Err(Error::field("scatterers", "must list at least one scatterer"));
        }
        for (i, s) in self.scatterers.iter().enumerate() {
            let at = |e: Error| match e {
                Error::InvalidShape(m) => Error::field(format!("scatterers[{i}].shape"), m),
                e => e,
            };
            s.shape.validate().map_err(at)?;
            if s.shape.dim() != dim {
                return Err(Error::field(
                    format!("scatterers[{i}].shape"),
                    format!("{}-D shape in a {dim}-D experiment", s.shape.dim()),
                ));
            }
        }
        self.audit_speed()?;
        Ok(())
    }

    /// Largest sampled emitter speed over the recording window.
    pub fn max_sampled_speed(&self) -> Result<f64> {
        let (t0, t1) = self
            .trajectory
            .domain()
            .unwrap_or((0.0, self.time_grid.total_time));
        let sampled = self.trajectory.sampled_max_speed(t0, t1, AUDIT_SAMPLES)?;
        Ok(sampled.max(self.trajectory.speed_bound()))
    }

    fn audit_speed(&self) -> Result<()> {
        let speed = self.max_sampled_speed()?;
        let c = self.medium.sound_speed;
        if speed < c {
            Ok(())
        } else {
            Err(Error::Supersonic { speed, c })
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }
}

/// Parses a JSON document into a validated, fully defaulted configuration.
///
/// A top-level `"preset"` key names a built-in configuration; the remaining
/// keys are merged over it. A run metadata file is accepted too, in which case
/// its recorded configuration is used.
pub fn parse_config(document: &str) -> Result<ExperimentConfig> {
    let mut value: Value =
        serde_json::from_str(document).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
    if let Some(recorded) = value.get("mowave_run").and(value.get("config")) {
        value = recorded.clone();
    }
    if let Some(obj) = value.as_object_mut() {
        if let Some(name) = obj.remove("preset") {
            let name = name
                .as_str()
                .ok_or_else(|| Error::field("preset", "must be a string"))?;
            let base = presets::preset(name)
                .ok_or_else(|| Error::field("preset", format!("unknown preset {name:?}")))?;
            let mut merged = serde_json::to_value(base).expect("configuration serializes");
            merge(&mut merged, value);
            value = merged;
        }
    }
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            Error::Config(inner.to_string())
        } else {
            Error::Config(format!("{path}: {inner}"))
        }
    })?;
    let cfg = cfg.complete();
    cfg.validate()?;
    Ok(cfg)
}

/// Deep merge of `overlay` into `base`. Objects merge key by key unless their
/// variant tags differ, in which case the overlay replaces the whole object.
fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() && same_variant(slot, &v) => {
                        merge(slot, v)
                    }
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn same_variant(a: &Value, b: &Value) -> bool {
    ["kind", "layout"].iter().all(|tag| match (a.get(tag), b.get(tag)) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    })
}
