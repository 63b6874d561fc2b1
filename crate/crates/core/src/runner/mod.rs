//! Experiment configuration, built-in presets and the end-to-end pipeline.

mod config;
mod heatmap;
mod pipeline;
pub mod presets;

pub use config::{parse_config, ExperimentConfig, Generator, IndicatorSet, ScattererSpec, AUDIT_SAMPLES};
pub use heatmap::{
    colormap, heatmap_raster, render_heatmap, render_heatmap_with, write_png, HeatmapStyle, Overlay,
    Raster, DEFAULT_MARGIN,
};
pub use pipeline::{
    audit_quadrature, config_hash, rerender, run_experiment, simulate, ForwardData, RunOutput, Scene,
    AUDIT_RECEIVERS, AUDIT_TOLERANCE, HEATMAP_CELL,
};
