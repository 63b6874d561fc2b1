//! Forward scattering: boundary density marching, field evaluation, the
//! small-obstacle model and measurement noise.

mod approx;
mod kirchhoff;
mod march;
mod noise;
mod record;

pub use approx::{approx_scattered, approx_scattered_with, small_obstacles, SmallObstacle, StrengthRule};
pub use kirchhoff::evaluate_scattered;
pub use march::{
    collocation_residual, late_growth, march_density, smooth_in_time, DensityHistory,
    MarchingOperator, FILTER_GROWTH,
};
pub use noise::{add_noise, NoiseSpec};
pub use record::{RecordKind, WaveRecord};
pub(crate) use record::sci;
