//! Geometric and signal ingredients of an experiment.
//!
//! All points are stored as 3-vectors; planar configurations use `z = 0`, so
//! Euclidean distances in the plane coincide with the 3-D distances used by
//! the kernels.

mod grid;
mod mesh;
mod receivers;
mod signal;
mod trajectory;

pub use grid::{SamplingGrid, TimeGrid};
pub use mesh::{
    build_boundary_mesh, triangle_inverse_distance, BoundaryMesh, Panel, PanelShape, ShapeSpec,
    SEGMENT_SELF_OFFSET,
};
pub use receivers::{
    make_receivers, surface_inverse_distance_integral, MeasurementArray, ReceiverLayout,
};
pub use signal::Signal;
pub use trajectory::{Trajectory, SPIRAL_POLE_CLAMP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = nalgebra::Vector3<f64>;

/// Homogeneous background medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Medium {
    pub sound_speed: f64,
}

impl Medium {
    pub fn new(sound_speed: f64) -> Result<Self> {
        let m = Medium { sound_speed };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sound_speed > 0.0 && self.sound_speed.is_finite() {
            Ok(())
        } else {
            Err(Error::field("medium.sound_speed", "must be positive"))
        }
    }
}

/// Serde helper: points as 2- or 3-element arrays.
pub mod pt {
    use super::Point;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Point, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(p.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Point, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        from_slice(&v).map_err(D::Error::custom)
    }

    pub(crate) fn from_slice(v: &[f64]) -> Result<Point, String> {
        match v.len() {
            2 => Ok(Point::new(v[0], v[1], 0.0)),
            3 => Ok(Point::new(v[0], v[1], v[2])),
            n => Err(format!("expected a point with 2 or 3 coordinates, got {n}")),
        }
    }
}

/// Serde helper for `Vec<Point>`.
pub mod pt_vec {
    use super::Point;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ps: &[Point], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(ps.iter().map(|p| [p.x, p.y, p.z]))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Point>, D::Error> {
        let v = Vec::<Vec<f64>>::deserialize(d)?;
        v.iter()
            .map(|p| super::pt::from_slice(p).map_err(D::Error::custom))
            .collect()
    }
}
