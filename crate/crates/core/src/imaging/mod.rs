//! Direct sampling: probe fields, indicator functionals and images.

mod image;
mod indicators;
mod probe;

pub use image::{normalize_image, IndicatorImage, IndicatorKind};
pub use indicators::{
    indicator_i1, indicator_i2, indicator_i2tilde, relative_image_difference, ConvolutionMethod,
    I1_OVERSHOOT, NEGLIGIBLE,
};
pub use probe::{kernel_Gz, probe_U, probe_u, ProbePrecomp};
