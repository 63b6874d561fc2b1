//! Closed-form small-obstacle model of the scattered field.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forward::march::coupling;
use crate::forward::{RecordKind, WaveRecord};
use crate::incident::Emitter;
use crate::scene::{BoundaryMesh, MeasurementArray, Point, TimeGrid};

/// How the scattering strength `C` of a small component is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrengthRule {
    /// `C = A / E` with `E` the single-layer row sum at the panel nearest
    /// the component centre.
    #[default]
    NearestPanel,
    /// `C = Σ_j Δs_j q_j` where `M₀ q = 1` and `M₀` is the delay-free
    /// collocation matrix of the component: the static limit of the
    /// discrete boundary equation.
    Capacitance,
}

/// Per-component point-scatterer parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallObstacle {
    pub center: Point,
    /// Boundary measure `A`.
    pub measure: f64,
    /// Single-layer row sum `E` at the panel nearest the centre.
    pub row_sum: f64,
    /// Scattering strength `C` under the chosen rule.
    pub strength: f64,
}

pub fn small_obstacles(mesh: &BoundaryMesh, rule: StrengthRule) -> Vec<SmallObstacle> {
    mesh.components
        .iter()
        .enumerate()
        .map(|(k, range)| {
            let center = mesh.component_center(k);
            let nearest = range
                .clone()
                .min_by(|&a, &b| {
                    let da = (mesh.panels[a].centroid - center).norm();
                    let db = (mesh.panels[b].centroid - center).norm();
                    da.total_cmp(&db)
                })
                .expect("nonempty component");
            let row_sum = range.clone().map(|j| coupling(mesh, nearest, j).1).sum();
            let measure = mesh.component_measure(k);
            let strength = match rule {
                StrengthRule::NearestPanel => measure / row_sum,
                StrengthRule::Capacitance => static_capacitance(mesh, range.clone()),
            };
            SmallObstacle {
                center,
                measure,
                row_sum,
                strength,
            }
        })
        .collect()
}

fn static_capacitance(mesh: &BoundaryMesh, range: std::ops::Range<usize>) -> f64 {
    let n = range.len();
    let m = DMatrix::from_fn(n, n, |a, b| coupling(mesh, range.start + a, range.start + b).1);
    let q = m
        .lu()
        .solve(&DVector::from_element(n, 1.0))
        .unwrap_or_else(|| DVector::from_element(n, f64::NAN));
    range.zip(q.iter()).map(|(j, q)| mesh.panels[j].measure * q).sum()
}

/// Small-obstacle model summed over the mesh components:
/// `u(x, t) ≈ -Σ_k C_k λ(t̃ - |s(τ̃) - y_k|/c) / (16π² |x - y_k| |s(τ̃) - y_k| D)`
/// with `t̃ = t - |x - y_k|/c`, i.e. `-C_k u^i(y_k, t̃) / (4π |x - y_k|)`;
/// `doppler = false` sets `D = 1`.
pub fn approx_scattered(
    mesh: &BoundaryMesh,
    emitter: &Emitter,
    receivers: &MeasurementArray,
    grid: &TimeGrid,
    doppler: bool,
) -> Result<WaveRecord> {
    approx_scattered_with(mesh, emitter, receivers, grid, doppler, StrengthRule::NearestPanel)
}

pub fn approx_scattered_with(
    mesh: &BoundaryMesh,
    emitter: &Emitter,
    receivers: &MeasurementArray,
    grid: &TimeGrid,
    doppler: bool,
    rule: StrengthRule,
) -> Result<WaveRecord> {
    let obstacles = small_obstacles(mesh, rule);
    if let Some(ob) = obstacles.iter().find(|o| !o.strength.is_finite()) {
        return Err(Error::Geometry(format!(
            "no finite scattering strength for the component at {:?}",
            ob.center.as_slice()
        )));
    }
    let size = mesh.panel_size();
    for x in &receivers.points {
        if mesh.distance_to(x) <= size {
            return Err(Error::Geometry("receiver touches the scatterer".into()));
        }
    }
    let c = emitter.medium.sound_speed;
    let mut rec = WaveRecord::zeros(
        RecordKind::Scattered,
        receivers.points.clone(),
        receivers.weights.clone(),
        *grid,
        c,
    );
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        receivers
            .points
            .par_iter()
            .map(|x| {
                let mut out = vec![0.0; grid.len()];
                for ob in &obstacles {
                    let r = (x - ob.center).norm();
                    // relayed_field already carries 1/(4π|s - y|).
                    let scale = -ob.strength / (4.0 * PI * r);
                    let mut last = None;
                    for (k, o) in out.iter_mut().enumerate() {
                        let field =
                            emitter.relayed_field_from(&ob.center, grid.time(k) - r / c, doppler, &mut last)?;
                        *o += scale * field;
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?
    };
    for (i, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            rec.values[[i, k]] = v;
        }
    }
    Ok(rec)
}
