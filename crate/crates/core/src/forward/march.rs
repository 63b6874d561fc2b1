//! Marching-on-in-time solution of the retarded single-layer equation
//! `Σ_j A_ij g_j(t_k - r_ij/c) = -u^i(x_i, t_k)` at the panel centroids.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::{RecordKind, WaveRecord};
use crate::scene::{BoundaryMesh, Medium, TimeGrid};

/// The late-time filter fires when the final tenth of the history is this
/// many times larger than everything before it.
pub const FILTER_GROWTH: f64 = 10.0;

/// Density samples `values[[k, j]]` at time `t_k` on panel `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityHistory {
    pub grid: TimeGrid,
    pub values: Array2<f64>,
    /// Set when the late-time smoothing filter was applied.
    pub filtered: bool,
}

impl DensityHistory {
    pub fn panels(&self) -> usize {
        self.values.ncols()
    }

    /// Linear interpolant in time; zero before `t = 0`, held after `T_tot`.
    pub fn at(&self, j: usize, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let s = t / self.grid.dt();
        let m = s.floor() as usize;
        if m >= self.grid.steps {
            return self.values[[self.grid.steps, j]];
        }
        let a = s - m as f64;
        (1.0 - a) * self.values[[m, j]] + a * self.values[[m + 1, j]]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Distance and single-layer weight of panel `j` seen from centroid `i`.
#[inline]
pub(crate) fn coupling(mesh: &BoundaryMesh, i: usize, j: usize) -> (f64, f64) {
    if i == j {
        return (0.0, mesh.panels[i].self_integral());
    }
    let r = (mesh.panels[i].centroid - mesh.panels[j].centroid).norm();
    (r, mesh.panels[j].measure / (4.0 * PI * r))
}

/// Splits `g(t_k - r/c)` into `(1-α) g[k-m] + α g[k-m-1]`.
#[inline]
pub(crate) fn delay_split(r: f64, c: f64, dt: f64) -> (usize, f64) {
    let s = r / (c * dt);
    let m = s.floor();
    (m as usize, s - m)
}

#[derive(Debug, Clone, Copy)]
struct Delayed {
    col: u32,
    delay: u32,
    weight: f64,
}

/// Assembled marching scheme: the factorized instantaneous matrix and, per
/// row, the couplings to earlier steps in ascending column order.
pub struct MarchingOperator {
    n: usize,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    history: Vec<Vec<Delayed>>,
}

impl MarchingOperator {
    pub fn assemble(mesh: &BoundaryMesh, grid: &TimeGrid, medium: &Medium) -> Result<Self> {
        let n = mesh.len();
        let (c, dt) = (medium.sound_speed, grid.dt());
        let rows: Vec<(Vec<f64>, Vec<Delayed>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut now = vec![0.0; n];
                let mut hist = Vec::new();
                for j in 0..n {
                    let (r, a) = coupling(mesh, i, j);
                    debug_assert_eq!(r, coupling(mesh, j, i).0);
                    let (m, alpha) = delay_split(r, c, dt);
                    let mut push = |d: usize, w: f64| {
                        if w == 0.0 {
                            return;
                        }
                        if d == 0 {
                            now[j] += w;
                        } else {
                            hist.push(Delayed {
                                col: j as u32,
                                delay: d as u32,
                                weight: w,
                            });
                        }
                    };
                    push(m, (1.0 - alpha) * a);
                    push(m + 1, alpha * a);
                }
                (now, hist)
            })
            .collect();
        let mut mat = DMatrix::zeros(n, n);
        let mut history = Vec::with_capacity(n);
        for (i, (now, hist)) in rows.into_iter().enumerate() {
            for (j, v) in now.into_iter().enumerate() {
                mat[(i, j)] = v;
            }
            history.push(hist);
        }
        let lu = mat.lu();
        if !lu.is_invertible() {
            return Err(Error::Assembly {
                step: 0,
                msg: "instantaneous interaction matrix is singular".into(),
            });
        }
        Ok(MarchingOperator { n, lu, history })
    }

    /// March over all steps of `incident`; `values[[k, j]]`.
    pub fn march(&self, incident: &WaveRecord) -> Result<Array2<f64>> {
        let n = self.n;
        let steps = incident.grid.len();
        let mut g = vec![0.0; steps * n];
        let mut rhs = DVector::zeros(n);
        for k in 0..steps {
            let past = &g[..k * n];
            let hist: Vec<f64> = if n >= 64 {
                self.history
                    .par_iter()
                    .map(|row| history_sum(row, past, k, n))
                    .collect()
            } else {
                self.history.iter().map(|row| history_sum(row, past, k, n)).collect()
            };
            for i in 0..n {
                rhs[i] = -incident.values[[i, k]] - hist[i];
            }
            if !self.lu.solve_mut(&mut rhs) {
                return Err(Error::Assembly {
                    step: k,
                    msg: "linear solve failed".into(),
                });
            }
            if let Some(bad) = rhs.iter().position(|v| !v.is_finite()) {
                return Err(Error::Assembly {
                    step: k,
                    msg: format!("non-finite density on panel {bad}"),
                });
            }
            g[k * n..(k + 1) * n].copy_from_slice(rhs.as_slice());
        }
        Ok(Array2::from_shape_vec((steps, n), g).expect("shape"))
    }
}

#[inline]
fn history_sum(row: &[Delayed], past: &[f64], k: usize, n: usize) -> f64 {
    let mut s = 0.0;
    for e in row {
        let d = e.delay as usize;
        if d <= k {
            s += e.weight * past[(k - d) * n + e.col as usize];
        }
    }
    s
}

pub fn march_density(
    mesh: &BoundaryMesh,
    incident: &WaveRecord,
    medium: &Medium,
) -> Result<DensityHistory> {
    if incident.kind != RecordKind::Incident {
        return Err(Error::Config(format!(
            "density marching needs an incident record, got {}",
            incident.kind
        )));
    }
    if incident.receivers() != mesh.len() {
        return Err(Error::Config(format!(
            "incident record has {} points for {} panels",
            incident.receivers(),
            mesh.len()
        )));
    }
    if (incident.sound_speed - medium.sound_speed).abs() > 0.0 {
        return Err(Error::Config("incident record uses a different sound speed".into()));
    }
    incident.grid.validate()?;
    let op = MarchingOperator::assemble(mesh, &incident.grid, medium)?;
    let values = op.march(incident)?;
    let mut hist = DensityHistory {
        grid: incident.grid,
        values,
        filtered: false,
    };
    if late_growth(&hist.values) {
        smooth_in_time(&mut hist.values);
        hist.filtered = true;
    }
    Ok(hist)
}

/// True when `max|g|` over the final tenth of the steps exceeds
/// `FILTER_GROWTH` times the maximum over the earlier, nonzero part.
pub fn late_growth(values: &Array2<f64>) -> bool {
    let steps = values.nrows();
    if steps < 10 {
        return false;
    }
    let split = steps - steps / 10;
    let peak = |rows: std::ops::Range<usize>| {
        rows.flat_map(|k| values.row(k).to_vec())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    };
    let early = peak(0..split);
    let late = peak(split..steps);
    early > 0.0 && late > FILTER_GROWTH * early
}

/// `g[k] ← (g[k-1] + 2g[k] + g[k+1]) / 4` on interior steps.
pub fn smooth_in_time(values: &mut Array2<f64>) {
    let orig = values.clone();
    for k in 1..values.nrows().saturating_sub(1) {
        for j in 0..values.ncols() {
            values[[k, j]] = 0.25 * (orig[[k - 1, j]] + 2.0 * orig[[k, j]] + orig[[k + 1, j]]);
        }
    }
}

/// `max_{i,k} |Σ_j A_ij g_j(t_k - r_ij/c) + u^i(x_i, t_k)|`, evaluated
/// through [`DensityHistory::at`] rather than the marching tables.
pub fn collocation_residual(
    mesh: &BoundaryMesh,
    density: &DensityHistory,
    incident: &WaveRecord,
    medium: &Medium,
) -> f64 {
    let n = mesh.len();
    let c = medium.sound_speed;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let row: Vec<(f64, f64)> = (0..n).map(|j| coupling(mesh, i, j)).collect();
            let mut worst = 0.0f64;
            for k in 0..density.grid.len() {
                let t = density.grid.time(k);
                let mut s = incident.values[[i, k]];
                for (j, &(r, a)) in row.iter().enumerate() {
                    s += a * density.at(j, t - r / c);
                }
                worst = worst.max(s.abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}
