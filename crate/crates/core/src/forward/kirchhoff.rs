//! Retarded single-layer potential of a marched density at the receivers.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::march::{delay_split, DensityHistory};
use crate::forward::{RecordKind, WaveRecord};
use crate::scene::{BoundaryMesh, MeasurementArray, Medium, TimeGrid};

/// `u(x_i, t_k) = Σ_j Δs_j g_j(t_k - r_ij/c) / (4π r_ij)`.
pub fn evaluate_scattered(
    mesh: &BoundaryMesh,
    density: &DensityHistory,
    receivers: &MeasurementArray,
    grid: &TimeGrid,
    medium: &Medium,
) -> Result<WaveRecord> {
    if density.grid != *grid {
        return Err(Error::Config("density and output time grids differ".into()));
    }
    if density.panels() != mesh.len() {
        return Err(Error::Config("density does not match the mesh".into()));
    }
    let size = mesh.panel_size();
    for x in &receivers.points {
        let d = mesh.distance_to(x);
        if d <= size {
            return Err(Error::Geometry(format!(
                "receiver at {:?} lies within {d} of the scatterer",
                x.as_slice()
            )));
        }
    }
    let (c, dt) = (medium.sound_speed, grid.dt());
    let steps = grid.len();
    // Panel-major copy so each panel's history is contiguous.
    let by_panel = density.values.t().as_standard_layout().into_owned();
    let rows: Vec<Vec<f64>> = receivers
        .points
        .par_iter()
        .map(|x| {
            let mut out = vec![0.0; steps];
            for (j, p) in mesh.panels.iter().enumerate() {
                let r = (x - p.centroid).norm();
                let w = p.measure / (4.0 * PI * r);
                let (m, a) = delay_split(r, c, dt);
                let g = by_panel.row(j);
                let g = g.as_slice().expect("contiguous");
                let (w0, w1) = ((1.0 - a) * w, a * w);
                for k in m..steps {
                    let mut v = w0 * g[k - m];
                    if k > m {
                        v += w1 * g[k - m - 1];
                    }
                    out[k] += v;
                }
            }
            out
        })
        .collect();
    Ok(WaveRecord::from_rows(
        RecordKind::Scattered,
        receivers.points.clone(),
        receivers.weights.clone(),
        *grid,
        c,
        rows,
    ))
}
