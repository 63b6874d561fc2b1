//! Receiver layouts on the measurement curve or surface `Γ_m`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReceiverLayout {
    /// Uniform angles `2πk/count` on a circle in the plane.
    Circle { radius: f64, count: usize },
    /// Fibonacci spiral on a sphere centred at the origin.
    Sphere { radius: f64, count: usize },
    /// Midpoints of `count` equal sub-arcs of `[start, start + span]`.
    Arc {
        radius: f64,
        count: usize,
        span: f64,
        #[serde(default)]
        start: f64,
    },
}

impl ReceiverLayout {
    pub fn count(&self) -> usize {
        match self {
            ReceiverLayout::Circle { count, .. }
            | ReceiverLayout::Sphere { count, .. }
            | ReceiverLayout::Arc { count, .. } => *count,
        }
    }

    pub fn with_count(&self, n: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            ReceiverLayout::Circle { count, .. }
            | ReceiverLayout::Sphere { count, .. }
            | ReceiverLayout::Arc { count, .. } => *count = n,
        }
        out
    }

    pub fn dim(&self) -> usize {
        match self {
            ReceiverLayout::Sphere { .. } => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementArray {
    pub points: Vec<Point>,
    /// Control measure `Δs` of each receiver.
    pub weights: Vec<f64>,
    /// Radius of the circle/sphere the receivers sit on.
    pub radius: f64,
    pub layout: ReceiverLayout,
}

impl MeasurementArray {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_spherical(&self) -> bool {
        matches!(self.layout, ReceiverLayout::Sphere { .. })
    }

    /// Reorders receivers by `perm` (`out[i] = self[perm[i]]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        MeasurementArray {
            points: perm.iter().map(|&i| self.points[i]).collect(),
            weights: perm.iter().map(|&i| self.weights[i]).collect(),
            radius: self.radius,
            layout: self.layout.clone(),
        }
    }
}

pub fn make_receivers(spec: &ReceiverLayout) -> Result<MeasurementArray> {
    let (radius, count) = match spec {
        ReceiverLayout::Circle { radius, count }
        | ReceiverLayout::Sphere { radius, count }
        | ReceiverLayout::Arc { radius, count, .. } => (*radius, *count),
    };
    if count == 0 {
        return Err(Error::field("receivers.count", "must be at least 1"));
    }
    if !(radius > 0.0) {
        return Err(Error::field("receivers.radius", "must be positive"));
    }
    let n = count as f64;
    let (points, w): (Vec<Point>, f64) = match spec {
        ReceiverLayout::Circle { .. } => (
            (0..count)
                .map(|k| {
                    let (s, c) = (2.0 * PI * k as f64 / n).sin_cos();
                    Point::new(radius * c, radius * s, 0.0)
                })
                .collect(),
            2.0 * PI * radius / n,
        ),
        ReceiverLayout::Arc { span, start, .. } => {
            if !(*span > 0.0 && *span <= 2.0 * PI) {
                return Err(Error::field("receivers.span", "must lie in (0, 2π]"));
            }
            (
                (0..count)
                    .map(|k| {
                        let (s, c) = (start + span * (k as f64 + 0.5) / n).sin_cos();
                        Point::new(radius * c, radius * s, 0.0)
                    })
                    .collect(),
                span * radius / n,
            )
        }
        ReceiverLayout::Sphere { .. } => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (
                (0..count)
                    .map(|k| {
                        let z = 1.0 - (2.0 * k as f64 + 1.0) / n;
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let (s, c) = (golden * k as f64).sin_cos();
                        Point::new(radius * r * c, radius * r * s, radius * z)
                    })
                    .collect(),
                4.0 * PI * radius * radius / n,
            )
        }
    };
    Ok(MeasurementArray {
        weights: vec![w; points.len()],
        points,
        radius,
        layout: spec.clone(),
    })
}

/// `Σ_i Δs_i / |x_i - z|`, the receiver quadrature of `∫_{Γ_m} ds/|x - z|`,
/// which equals `4πR` on a sphere of radius `R` for every `|z| ≤ R`.
pub fn surface_inverse_distance_integral(arr: &MeasurementArray, z: &Point) -> Result<f64> {
    if !arr.is_spherical() {
        return Err(Error::Geometry("inverse-distance identity needs a spherical array".into()));
    }
    if z.norm() > arr.radius * (1.0 + 1e-12) {
        return Err(Error::Geometry(format!(
            "point at radius {} lies outside the sphere of radius {}",
            z.norm(),
            arr.radius
        )));
    }
    let mut sum = 0.0;
    for (x, w) in arr.points.iter().zip(&arr.weights) {
        let d = (x - z).norm();
        if d <= 1e-12 * arr.radius {
            return Err(Error::ExcludedPoint);
        }
        sum += w / d;
    }
    Ok(sum)
}
