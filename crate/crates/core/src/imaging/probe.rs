//! Probe field `U(x, t; z)` and convolution kernel `G_z(x, t)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::forward::WaveRecord;
use crate::incident::Emitter;
use crate::scene::{Medium, Point, Signal, Trajectory};

/// `U(x, t; z) = -λ(t̃ - |s(τ̃) - z|/c) / (4π |x - z| |s(τ̃) - z| D(τ̃))`
/// with `t̃ = t - |x - z|/c`, i.e. `-u^i(z, t̃) / |x - z|`.
pub fn probe_u(emitter: &Emitter, z: &Point, x: &Point, t: f64) -> Result<f64> {
    probe_u_from(emitter, z, x, t, &mut None)
}

fn probe_u_from(
    emitter: &Emitter,
    z: &Point,
    x: &Point,
    t: f64,
    last: &mut Option<(f64, f64)>,
) -> Result<f64> {
    let r = (x - z).norm();
    if r <= crate::incident::SINGULAR_DISTANCE {
        return Err(Error::Geometry("probe point coincides with a receiver".into()));
    }
    let t_tilde = t - r / emitter.medium.sound_speed;
    match emitter.relayed_field_from(z, t_tilde, true, last) {
        Ok(v) => Ok(-v / r),
        Err(Error::SingularField { distance }) => Err(Error::Geometry(format!(
            "sampling point lies on the trajectory (distance {distance:e})"
        ))),
        Err(e) => Err(e),
    }
}

/// Free-function form of [`probe_u`].
#[allow(non_snake_case)]
pub fn probe_U(
    traj: &Trajectory,
    sig: &Signal,
    medium: &Medium,
    z: &Point,
    x: &Point,
    t: f64,
) -> Result<f64> {
    probe_u(&Emitter::new(traj.clone(), sig.clone(), *medium)?, z, x, t)
}

/// `G_z(x, t) = λ(t + |x - z|/c) / (4π √|x - z|)`.
#[allow(non_snake_case)]
pub fn kernel_Gz(sig: &Signal, medium: &Medium, z: &Point, x: &Point, t: f64) -> Result<f64> {
    let r = (x - z).norm();
    if r == 0.0 {
        return Err(Error::Geometry("kernel evaluated at its own sampling point".into()));
    }
    Ok(sig.eval(t + r / medium.sound_speed) / (4.0 * PI * r.sqrt()))
}

/// Cached probe values `U(x_i, t_k; z)` for one sampling point, `k < N_t`,
/// laid out receiver-major.
#[derive(Debug, Clone)]
pub struct ProbePrecomp {
    pub z: Point,
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    pub steps: usize,
}

impl ProbePrecomp {
    pub fn new(emitter: &Emitter, z: &Point, data: &WaveRecord) -> Result<Self> {
        let steps = data.grid.steps;
        let mut values = Vec::with_capacity(data.receivers() * steps);
        let mut distances = Vec::with_capacity(data.receivers());
        for x in &data.points {
            distances.push((x - z).norm());
            let mut last = None;
            for k in 0..steps {
                values.push(probe_u_from(emitter, z, x, data.grid.time(k), &mut last)?);
            }
        }
        Ok(ProbePrecomp {
            z: *z,
            distances,
            values,
            steps,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.steps..(i + 1) * self.steps]
    }
}
