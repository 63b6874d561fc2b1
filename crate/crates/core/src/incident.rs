//! Retarded times and the incident field of the moving point source.
//!
//! The field radiated by a subsonic source with signal `λ` is
//!
//! ```text
//! u^i(x, t) = λ(τ) / (4π |x - s(τ)| (1 - v(τ)·(x - s(τ)) / (c |x - s(τ)|)))
//! ```
//!
//! where the emission time `τ` solves `t = τ + |x - s(τ)| / c`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::{RecordKind, WaveRecord};
use crate::scene::{BoundaryMesh, Medium, Point, Signal, TimeGrid, Trajectory};

/// Observation points closer than this to the emitter are rejected.
pub const SINGULAR_DISTANCE: f64 = 1e-9;

/// Fixed-point iterations before the bisection fallback.
pub const MAX_ITERATIONS: usize = 200;

/// Absolute residual target of the retarded-time solve, relaxed to a few ulps
/// of `t` for very late times.
pub const RETARDED_TOL: f64 = 1e-13;

fn residual_tolerance(t: f64) -> f64 {
    RETARDED_TOL.max(4.0 * f64::EPSILON * t.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetardedSolve {
    pub x: Point,
    pub t: f64,
    pub tau: f64,
    /// `t - τ - |x - s(τ)|/c` at the returned `τ`.
    pub residual: f64,
    pub iterations: usize,
    pub bisected: bool,
    /// `s(τ)`.
    pub position: Point,
    /// `v(τ)`.
    pub velocity: Point,
}

/// Iteration used for the retarded-time equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RetardedMethod {
    /// `τ ← t - |x - s(τ)|/c`, a contraction with factor `sup|v|/c`.
    FixedPoint,
    /// The fixed-point residual divided by the Doppler factor (a Newton step
    /// on the same equation), falling back to the plain fixed-point step when
    /// the residual does not shrink.
    #[default]
    Accelerated,
}

/// Subsonic emitter: trajectory, signal and medium checked together once.
#[derive(Debug, Clone)]
pub struct Emitter {
    pub trajectory: Trajectory,
    pub signal: Signal,
    pub medium: Medium,
    speed_bound: f64,
    method: RetardedMethod,
}

impl Emitter {
    pub fn new(trajectory: Trajectory, signal: Signal, medium: Medium) -> Result<Self> {
        trajectory.validate()?;
        signal.validate()?;
        medium.validate()?;
        let speed_bound = trajectory.speed_bound();
        if !(speed_bound < medium.sound_speed) {
            return Err(Error::Supersonic {
                speed: speed_bound,
                c: medium.sound_speed,
            });
        }
        Ok(Emitter {
            trajectory,
            signal,
            medium,
            speed_bound,
            method: RetardedMethod::default(),
        })
    }

    pub fn with_method(mut self, method: RetardedMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_signal(&self, signal: Signal) -> Self {
        Emitter {
            signal,
            ..self.clone()
        }
    }

    /// Bound on `|v|` established at construction.
    pub fn speed_bound(&self) -> f64 {
        self.speed_bound
    }

    #[inline]
    fn c(&self) -> f64 {
        self.medium.sound_speed
    }

    pub fn retarded_time(&self, x: &Point, t: f64) -> Result<RetardedSolve> {
        self.iterate(x, t, t, None)
    }

    /// Same as [`Emitter::retarded_time`], appending every iterate to `trace`.
    pub fn retarded_time_traced(
        &self,
        x: &Point,
        t: f64,
        trace: Option<&mut Vec<f64>>,
    ) -> Result<RetardedSolve> {
        self.iterate(x, t, t, trace)
    }

    /// Retarded time starting the iteration from `guess` (clamped to `≤ t`),
    /// e.g. the solution for a nearby observation time.
    pub fn retarded_time_from(&self, x: &Point, t: f64, guess: f64) -> Result<RetardedSolve> {
        self.iterate(x, t, guess.min(t), None)
    }

    fn iterate(
        &self,
        x: &Point,
        t: f64,
        start: f64,
        mut trace: Option<&mut Vec<f64>>,
    ) -> Result<RetardedSolve> {
        let c = self.c();
        let tol = residual_tolerance(t);
        let mut tau = start;
        let (mut pos, mut vel) = self.trajectory.state(tau)?;
        let mut residual = t - tau - (x - pos).norm() / c;
        for it in 0..MAX_ITERATIONS {
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(tau);
            }
            if residual.abs() <= tol {
                return Ok(RetardedSolve {
                    x: *x,
                    t,
                    tau,
                    residual,
                    iterations: it,
                    bisected: false,
                    position: pos,
                    velocity: vel,
                });
            }
            let step = match self.method {
                RetardedMethod::FixedPoint => residual,
                RetardedMethod::Accelerated => {
                    let d = x - pos;
                    let dist = d.norm();
                    let doppler = if dist > 0.0 {
                        1.0 - vel.dot(&d) / (c * dist)
                    } else {
                        1.0
                    };
                    if doppler > 0.0 {
                        residual / doppler
                    } else {
                        residual
                    }
                }
            };
            let mut next = tau + step;
            let (mut next_pos, mut next_vel) = self.trajectory.state(next)?;
            let mut next_res = t - next - (x - next_pos).norm() / c;
            if self.method == RetardedMethod::Accelerated && next_res.abs() >= residual.abs() {
                next = tau + residual;
                (next_pos, next_vel) = self.trajectory.state(next)?;
                next_res = t - next - (x - next_pos).norm() / c;
            }
            tau = next;
            pos = next_pos;
            vel = next_vel;
            residual = next_res;
        }
        self.bisect(x, t, tol)
    }

    fn bisect(&self, x: &Point, t: f64, tol: f64) -> Result<RetardedSolve> {
        let c = self.c();
        let f = |tau: f64| -> Result<f64> {
            Ok(t - tau - (x - self.trajectory.position(tau)?).norm() / c)
        };
        let mut hi = t;
        let mut lo = t - (x.norm() + self.trajectory.max_radius()) / c - 1e-9;
        if let Some((a, _)) = self.trajectory.domain() {
            lo = lo.max(a);
        }
        let (mut f_lo, f_hi) = (f(lo)?, f(hi)?);
        if f_hi.abs() <= tol {
            return self.solved(x, t, hi, f_hi, MAX_ITERATIONS);
        }
        if f_lo < 0.0 {
            return Err(Error::RetardedNotConverged { residual: f_lo });
        }
        for it in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid)?;
            if fm.abs() <= tol || hi - lo <= f64::EPSILON * t.abs().max(1.0) {
                return self.solved(x, t, mid, fm, MAX_ITERATIONS + it);
            }
            if (fm > 0.0) == (f_lo > 0.0) {
                lo = mid;
                f_lo = fm;
            } else {
                hi = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        Err(Error::RetardedNotConverged { residual: f(mid)? })
    }

    fn solved(&self, x: &Point, t: f64, tau: f64, residual: f64, iterations: usize) -> Result<RetardedSolve> {
        let (position, velocity) = self.trajectory.state(tau)?;
        Ok(RetardedSolve {
            x: *x,
            t,
            tau,
            residual,
            iterations,
            bisected: true,
            position,
            velocity,
        })
    }

    /// `1 / (4π |x - s(τ)| D)` for a solved emission, `D` the Doppler factor
    /// (or 1 without Doppler), together with `|x - s(τ)|`.
    #[inline]
    fn spreading(&self, x: &Point, solve: &RetardedSolve, doppler: bool) -> Result<(f64, f64)> {
        let d = x - solve.position;
        let dist = d.norm();
        if dist <= SINGULAR_DISTANCE {
            return Err(Error::SingularField { distance: dist });
        }
        let factor = if doppler {
            let f = 1.0 - solve.velocity.dot(&d) / (self.c() * dist);
            if !(f > 0.0) {
                return Err(Error::Supersonic {
                    speed: solve.velocity.norm(),
                    c: self.c(),
                });
            }
            f
        } else {
            1.0
        };
        Ok((1.0 / (4.0 * std::f64::consts::PI * dist * factor), dist))
    }

    /// `u^i(x, t)`.
    pub fn incident_field(&self, x: &Point, t: f64) -> Result<f64> {
        self.incident_field_from(x, t, &mut None)
    }

    /// [`Emitter::incident_field`] warm-started from the `(t, τ)` pair in
    /// `last`, which is updated with the new solution.
    pub fn incident_field_from(&self, x: &Point, t: f64, last: &mut Option<(f64, f64)>) -> Result<f64> {
        // τ ≤ t, so a causal signal is silent before t = 0.
        if t < 0.0 || self.signal.is_zero() {
            return Ok(0.0);
        }
        let solve = self.solve_from(x, t, last)?;
        let (spread, _) = self.spreading(x, &solve, true)?;
        Ok(self.signal.eval(solve.tau) * spread)
    }

    #[inline]
    fn solve_from(&self, x: &Point, t: f64, last: &mut Option<(f64, f64)>) -> Result<RetardedSolve> {
        let solve = match *last {
            // τ advances at roughly the observation rate.
            Some((t0, tau0)) => self.retarded_time_from(x, t, tau0 + (t - t0))?,
            None => self.retarded_time(x, t)?,
        };
        *last = Some((t, solve.tau));
        Ok(solve)
    }

    /// Field observed at `z` at time `t_tilde`, written with the signal
    /// argument `t_tilde - |s(τ̃) - z|/c`, warm-started like
    /// [`Emitter::incident_field_from`]. Shared by the small-obstacle model
    /// and the imaging probe.
    pub(crate) fn relayed_field_from(
        &self,
        z: &Point,
        t_tilde: f64,
        doppler: bool,
        last: &mut Option<(f64, f64)>,
    ) -> Result<f64> {
        if t_tilde < 0.0 || self.signal.is_zero() {
            return Ok(0.0);
        }
        let solve = self.solve_from(z, t_tilde, last)?;
        let (spread, dist) = self.spreading(z, &solve, doppler)?;
        Ok(self.signal.eval(t_tilde - dist / self.c()) * spread)
    }
}

pub fn solve_retarded_time(
    traj: &Trajectory,
    medium: &Medium,
    x: &Point,
    t: f64,
) -> Result<RetardedSolve> {
    Emitter::new(traj.clone(), Signal::Zero, *medium)?.retarded_time(x, t)
}

pub fn incident_field(
    traj: &Trajectory,
    sig: &Signal,
    medium: &Medium,
    x: &Point,
    t: f64,
) -> Result<f64> {
    Emitter::new(traj.clone(), sig.clone(), *medium)?.incident_field(x, t)
}

/// Incident field at every panel centroid and grid time.
pub fn incident_on_mesh(
    emitter: &Emitter,
    mesh: &BoundaryMesh,
    grid: &TimeGrid,
) -> Result<WaveRecord> {
    let size = mesh.panel_size();
    for k in 0..grid.len() {
        let s = emitter.trajectory.position(grid.time(k))?;
        let d = mesh.clearance(&s);
        if d <= size {
            return Err(Error::Geometry(format!(
                "emitter passes within {d} of the scatterer at t = {}",
                grid.time(k)
            )));
        }
    }
    let points: Vec<Point> = mesh.panels.iter().map(|p| p.centroid).collect();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|x| {
            let mut last = None;
            (0..grid.len())
                .map(|k| emitter.incident_field_from(x, grid.time(k), &mut last))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(WaveRecord::from_rows(
        RecordKind::Incident,
        points,
        mesh.panels.iter().map(|p| p.measure).collect(),
        *grid,
        emitter.medium.sound_speed,
        rows,
    ))
}
