//! Emitter paths `s(t)` and their velocities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::Point;

/// Fraction of the spiral's duration near each pole inside which the velocity
/// is evaluated at the clamped parameter. The polar angle `arccos(1 - 2p)` has
/// an unbounded derivative at `p = 0` and `p = 1`.
pub const SPIRAL_POLE_CLAMP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Trajectory {
    Stationary {
        #[serde(with = "crate::scene::pt")]
        point: Point,
    },
    /// `s(t) = R (cos(ωt + φ), sin(ωt + φ))` in the plane.
    Circle2d {
        radius: f64,
        angular_speed: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Spherical spiral with polar angle `arccos(1 - 2p)` and azimuth
    /// `2nπp`, `p = t / total_time`. Parked at the poles outside
    /// `[0, total_time]`.
    Spiral3d {
        radius: f64,
        turns: f64,
        total_time: f64,
    },
    /// Piecewise-linear path through `(times[i], points[i])`.
    Polyline {
        times: Vec<f64>,
        #[serde(with = "crate::scene::pt_vec")]
        points: Vec<Point>,
    },
}

impl Trajectory {
    pub fn validate(&self) -> Result<()> {
        match self {
            Trajectory::Stationary { .. } => Ok(()),
            Trajectory::Circle2d { radius, .. } => {
                if *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::field("trajectory.radius", "must be positive"))
                }
            }
            Trajectory::Spiral3d {
                radius,
                turns,
                total_time,
            } => {
                if *radius <= 0.0 {
                    return Err(Error::field("trajectory.radius", "must be positive"));
                }
                if *total_time <= 0.0 {
                    return Err(Error::field("trajectory.total_time", "must be positive"));
                }
                if !turns.is_finite() {
                    return Err(Error::field("trajectory.turns", "must be finite"));
                }
                Ok(())
            }
            Trajectory::Polyline { times, points } => {
                if times.len() < 2 || times.len() != points.len() {
                    return Err(Error::field(
                        "trajectory.points",
                        "polyline needs at least two samples and one point per time",
                    ));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::field("trajectory.times", "must be strictly increasing"));
                }
                Ok(())
            }
        }
    }

    /// Emitter position `s(t)`.
    pub fn position(&self, t: f64) -> Result<Point> {
        match self {
            Trajectory::Stationary { point } => Ok(*point),
            Trajectory::Circle2d {
                radius,
                angular_speed,
                phase,
            } => {
                let (s, c) = (angular_speed * t + phase).sin_cos();
                Ok(Point::new(radius * c, radius * s, 0.0))
            }
            Trajectory::Spiral3d {
                radius,
                turns,
                total_time,
            } => {
                let p = (t / total_time).clamp(0.0, 1.0);
                let cos_a = 1.0 - 2.0 * p;
                let sin_a = 2.0 * (p * (1.0 - p)).sqrt();
                let (sb, cb) = (2.0 * turns * PI * p).sin_cos();
                Ok(Point::new(
                    radius * sin_a * cb,
                    radius * sin_a * sb,
                    radius * cos_a,
                ))
            }
            Trajectory::Polyline { times, points } => {
                let seg = polyline_segment(times, t)?;
                let w = (t - times[seg]) / (times[seg + 1] - times[seg]);
                Ok(points[seg] * (1.0 - w) + points[seg + 1] * w)
            }
        }
    }

    /// Emitter velocity `v(t) = ds/dt`.
    pub fn velocity(&self, t: f64) -> Result<Point> {
        match self {
            Trajectory::Stationary { .. } => Ok(Point::zeros()),
            Trajectory::Circle2d {
                radius,
                angular_speed,
                phase,
            } => {
                let (s, c) = (angular_speed * t + phase).sin_cos();
                Ok(Point::new(
                    -radius * angular_speed * s,
                    radius * angular_speed * c,
                    0.0,
                ))
            }
            Trajectory::Spiral3d {
                radius,
                turns,
                total_time,
            } => {
                let p = t / total_time;
                if !(0.0..=1.0).contains(&p) {
                    return Ok(Point::zeros());
                }
                let p = p.clamp(SPIRAL_POLE_CLAMP, 1.0 - SPIRAL_POLE_CLAMP);
                let root = (p * (1.0 - p)).sqrt();
                let cos_a = 1.0 - 2.0 * p;
                let sin_a = 2.0 * root;
                let beta = 2.0 * turns * PI * p;
                let (sb, cb) = beta.sin_cos();
                let da = 1.0 / (total_time * root);
                let db = 2.0 * turns * PI / total_time;
                Ok(Point::new(
                    radius * (da * cos_a * cb - db * sin_a * sb),
                    radius * (da * cos_a * sb + db * sin_a * cb),
                    -radius * da * sin_a,
                ))
            }
            Trajectory::Polyline { times, points } => {
                let seg = polyline_segment(times, t)?;
                Ok((points[seg + 1] - points[seg]) / (times[seg + 1] - times[seg]))
            }
        }
    }

    /// Position and velocity together.
    #[inline]
    pub fn state(&self, t: f64) -> Result<(Point, Point)> {
        match self {
            Trajectory::Circle2d {
                radius,
                angular_speed,
                phase,
            } => {
                let (s, c) = (angular_speed * t + phase).sin_cos();
                Ok((
                    Point::new(radius * c, radius * s, 0.0),
                    Point::new(-radius * angular_speed * s, radius * angular_speed * c, 0.0),
                ))
            }
            _ => Ok((self.position(t)?, self.velocity(t)?)),
        }
    }

    /// Upper bound on `|s(t)|`, used to bracket retarded times.
    pub fn max_radius(&self) -> f64 {
        match self {
            Trajectory::Stationary { point } => point.norm(),
            Trajectory::Circle2d { radius, .. } | Trajectory::Spiral3d { radius, .. } => *radius,
            Trajectory::Polyline { points, .. } => {
                points.iter().map(|p| p.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// Time interval on which `position` is defined; `None` for all of ℝ.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            Trajectory::Polyline { times, .. } => Some((times[0], times[times.len() - 1])),
            _ => None,
        }
    }

    /// Largest `|v|` over the midpoints of `samples` equal intervals of
    /// `[t0, t1]` (exact for the circle and stationary kinds).
    pub fn sampled_max_speed(&self, t0: f64, t1: f64, samples: usize) -> Result<f64> {
        match self {
            Trajectory::Stationary { .. } => Ok(0.0),
            Trajectory::Circle2d {
                radius,
                angular_speed,
                ..
            } => Ok(radius * angular_speed.abs()),
            Trajectory::Polyline { times, points } => Ok(times
                .windows(2)
                .zip(points.windows(2))
                .map(|(t, p)| (p[1] - p[0]).norm() / (t[1] - t[0]))
                .fold(0.0, f64::max)),
            Trajectory::Spiral3d { .. } => {
                let n = samples.max(1);
                let h = (t1 - t0) / n as f64;
                let mut best = 0.0f64;
                for k in 0..n {
                    let t = t0 + (k as f64 + 0.5) * h;
                    best = best.max(self.velocity(t)?.norm());
                }
                Ok(best)
            }
        }
    }

    /// Speed bound used by the retarded-time solver's subsonic check.
    pub fn speed_bound(&self) -> f64 {
        match self {
            Trajectory::Spiral3d { total_time, .. } => self
                .sampled_max_speed(0.0, *total_time, 4096)
                .unwrap_or(f64::INFINITY),
            Trajectory::Polyline { times, .. } => self
                .sampled_max_speed(times[0], times[times.len() - 1], 1)
                .unwrap_or(f64::INFINITY),
            _ => self.sampled_max_speed(0.0, 1.0, 1).unwrap_or(f64::INFINITY),
        }
    }
}

fn polyline_segment(times: &[f64], t: f64) -> Result<usize> {
    let (lo, hi) = (times[0], times[times.len() - 1]);
    if !(lo..=hi).contains(&t) {
        return Err(Error::Domain { t, lo, hi });
    }
    let idx = times.partition_point(|&s| s <= t);
    Ok(idx.saturating_sub(1).min(times.len() - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn paper_circle() -> Trajectory {
        Trajectory::Circle2d {
            radius: 60.0,
            angular_speed: 2.0 * PI / 14.0,
            phase: 0.0,
        }
    }

    fn paper_spiral() -> Trajectory {
        Trajectory::Spiral3d {
            radius: 60.0,
            turns: 5.0,
            total_time: 42.0,
        }
    }

    #[test]
    fn circle_starts_at_60_0() {
        let p = paper_circle().position(0.0).unwrap();
        assert_relative_eq!(p, Point::new(60.0, 0.0, 0.0));
    }

    #[test]
    fn circle_speed_is_omega_r() {
        let traj = paper_circle();
        for k in 0..50 {
            let v = traj.velocity(k as f64 * 0.37).unwrap();
            assert_relative_eq!(v.norm(), 60.0 * 2.0 * PI / 14.0, max_relative = 1e-14);
        }
        assert_relative_eq!(60.0 * 2.0 * PI / 14.0, 26.927937, epsilon = 1e-6);
    }

    #[test]
    fn stationary_is_constant() {
        let p = Point::new(1.0, 2.0, 3.0);
        let traj = Trajectory::Stationary { point: p };
        assert_eq!(traj.position(-5.0).unwrap(), p);
        assert_eq!(traj.velocity(3.0).unwrap(), Point::zeros());
    }

    #[test]
    fn spiral_starts_at_north_pole_and_stays_on_sphere() {
        let traj = paper_spiral();
        assert_relative_eq!(traj.position(0.0).unwrap(), Point::new(0.0, 0.0, 60.0));
        for k in 0..=420 {
            let p = traj.position(k as f64 * 0.1).unwrap();
            assert_relative_eq!(p.norm(), 60.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn spiral_velocity_matches_central_difference() {
        let traj = paper_spiral();
        for &t in &[21.0, 5.3, 30.1, 40.0] {
            let h = 1e-5;
            let fd = (traj.position(t + h).unwrap() - traj.position(t - h).unwrap()) / (2.0 * h);
            let v = traj.velocity(t).unwrap();
            assert!((fd - v).norm() / v.norm() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn polyline_interpolates_and_rejects_outside_domain() {
        let traj = Trajectory::Polyline {
            times: vec![0.0, 1.0, 3.0],
            points: vec![
                Point::zeros(),
                Point::new(1.0, 0.0, 0.0),
                Point::new(1.0, 4.0, 0.0),
            ],
        };
        traj.validate().unwrap();
        assert_relative_eq!(traj.position(2.0).unwrap(), Point::new(1.0, 2.0, 0.0));
        assert_relative_eq!(traj.velocity(2.0).unwrap(), Point::new(0.0, 2.0, 0.0));
        assert_relative_eq!(traj.velocity(0.5).unwrap(), Point::new(1.0, 0.0, 0.0));
        assert!(matches!(traj.position(3.5), Err(Error::Domain { .. })));
        assert_relative_eq!(traj.speed_bound(), 2.0);
    }

    #[test]
    fn circle_speed_constant_over_grid() {
        let traj = Trajectory::Circle2d {
            radius: 60.0,
            angular_speed: 9.0 * 2.0 * PI / 14.0,
            phase: 0.3,
        };
        let speeds: Vec<f64> = (0..=2560)
            .map(|k| traj.velocity(k as f64 * 14.0 / 2560.0).unwrap().norm())
            .collect();
        let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
        let var = speeds.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / speeds.len() as f64;
        assert!(var.sqrt() / mean < 1e-12);
        // Fastest paper case stays subsonic, |v3| ≈ 242.
        assert_relative_eq!(mean, 242.35, epsilon = 0.01);
    }

    #[test]
    fn spiral_speed_bound_is_subsonic_for_paper_setup() {
        let bound = paper_spiral().speed_bound();
        assert!(bound < 340.0, "{bound}");
    }
}
