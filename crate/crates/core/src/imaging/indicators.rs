//! The direct-sampling indicators `I₁` and `Ĩ₂`.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::forward::{RecordKind, WaveRecord};
use crate::imaging::image::{IndicatorImage, IndicatorKind};
use crate::imaging::probe::{kernel_Gz, ProbePrecomp};
use crate::incident::Emitter;
use crate::scene::{Medium, Point, SamplingGrid, Signal};

/// How the causal convolutions of `Ĩ₂` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvolutionMethod {
    Direct,
    #[default]
    Fft,
}

/// Allowed floating-point overshoot of `I₁` above 1.
pub const I1_OVERSHOOT: f64 = 1e-12;

/// Data, probe and kernel samples smaller than this are treated as zero so
/// that no product in the indicator sums is subnormal.
pub const NEGLIGIBLE: f64 = 1e-150;

#[inline]
fn flush(v: f64) -> f64 {
    if v.abs() < NEGLIGIBLE {
        0.0
    } else {
        v
    }
}

/// Data rows `u[i][k]`, `k < N_t`, with negligible samples flushed.
fn data_rows(data: &WaveRecord) -> Vec<Vec<f64>> {
    (0..data.receivers())
        .map(|i| data.values.row(i).iter().take(data.grid.steps).map(|&v| flush(v)).collect())
        .collect()
}

fn check_data(data: &WaveRecord) -> Result<()> {
    match data.kind {
        RecordKind::Scattered | RecordKind::NoisyScattered => Ok(()),
        RecordKind::Incident => Err(Error::Config("imaging needs scattered data".into())),
    }
}

fn check_grid(data: &WaveRecord, grid: &SamplingGrid) -> Result<()> {
    grid.validate()?;
    for l in 0..grid.len() {
        let z = grid.point(l);
        if data.points.iter().any(|x| (x - z).norm() <= crate::incident::SINGULAR_DISTANCE) {
            return Err(Error::ExcludedPoint);
        }
    }
    Ok(())
}

/// `I₁(z) = |⟨u, U_z⟩| / (‖u‖ ‖U_z‖)` with weights `Δs_i Δt`, summed over
/// `k = 0..N_t-1`.
pub fn indicator_i1(data: &WaveRecord, emitter: &Emitter, grid: &SamplingGrid) -> Result<IndicatorImage> {
    check_data(data)?;
    check_grid(data, grid)?;
    let steps = data.grid.steps;
    let dt = data.grid.dt();
    let nm = data.receivers();
    let rows = data_rows(data);
    let mut norm_u = 0.0;
    for k in 0..steps {
        for i in 0..nm {
            let u = rows[i][k];
            norm_u += u * u * data.weights[i] * dt;
        }
    }
    if norm_u == 0.0 {
        return Err(Error::EmptyData);
    }
    let norm_u = norm_u.sqrt();
    let results: Vec<(f64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|l| {
            let probe = ProbePrecomp::new(emitter, &grid.point(l), data)?;
            let (mut dot, mut norm_p) = (0.0, 0.0);
            for k in 0..steps {
                for i in 0..nm {
                    let p = flush(probe.values[i * steps + k]);
                    let w = data.weights[i] * dt;
                    dot += rows[i][k] * p * w;
                    norm_p += p * p * w;
                }
            }
            if norm_p == 0.0 {
                return Ok((0.0, true));
            }
            let v = dot.abs() / (norm_u * norm_p.sqrt());
            let v = if v > 1.0 && v <= 1.0 + I1_OVERSHOOT { 1.0 } else { v };
            Ok((v, false))
        })
        .collect::<Result<_>>()?;
    let mut img = IndicatorImage::new(
        grid.clone(),
        results.iter().map(|r| r.0).collect(),
        IndicatorKind::I1,
    );
    img.zero_probe = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.1)
        .map(|(l, _)| l)
        .collect();
    Ok(img)
}

/// `Ĩ₂(z) = Σ_k |Σ_i Σ_{j≤k} u[i][k-j] G_z(x_i, t_j) Δt Δs_i|² Δt`.
pub fn indicator_i2tilde(
    data: &WaveRecord,
    sig: &Signal,
    medium: &Medium,
    grid: &SamplingGrid,
    method: ConvolutionMethod,
) -> Result<IndicatorImage> {
    let weights = data.weights.clone();
    convolution_energy(data, sig, medium, grid, method, &weights, IndicatorKind::I2tilde)
}

/// `I₂` for a known scatterer location `y0`: `Ĩ₂` with each receiver further
/// weighted by `√|x_i - y0|`.
pub fn indicator_i2(
    data: &WaveRecord,
    sig: &Signal,
    medium: &Medium,
    grid: &SamplingGrid,
    method: ConvolutionMethod,
    y0: &Point,
) -> Result<IndicatorImage> {
    let weights: Vec<f64> = data
        .points
        .iter()
        .zip(&data.weights)
        .map(|(x, w)| w * (x - y0).norm().sqrt())
        .collect();
    convolution_energy(data, sig, medium, grid, method, &weights, IndicatorKind::I2)
}

fn convolution_energy(
    data: &WaveRecord,
    sig: &Signal,
    medium: &Medium,
    grid: &SamplingGrid,
    method: ConvolutionMethod,
    weights: &[f64],
    kind: IndicatorKind,
) -> Result<IndicatorImage> {
    check_data(data)?;
    check_grid(data, grid)?;
    let steps = data.grid.steps;
    let dt = data.grid.dt();
    let kernel = |z: &Point| -> Result<Vec<Vec<f64>>> {
        data.points
            .iter()
            .map(|x| {
                (0..steps)
                    .map(|j| kernel_Gz(sig, medium, z, x, data.grid.time(j)).map(flush))
                    .collect()
            })
            .collect()
    };
    let energy = |w: &[f64]| -> f64 {
        w.iter().map(|&s| {
            let v = s * dt;
            v * v * dt
        }).sum()
    };
    let values: Vec<f64> = match method {
        ConvolutionMethod::Direct => {
            let rows = data_rows(data);
            (0..grid.len())
                .into_par_iter()
                .map(|l| {
                    let g = kernel(&grid.point(l))?;
                    let mut acc = vec![0.0; steps];
                    for (i, u) in rows.iter().enumerate() {
                        for (j, &gj) in g[i].iter().enumerate() {
                            let c = gj * weights[i];
                            if c == 0.0 {
                                continue;
                            }
                            axpy(&mut acc[j..], c, &u[..steps - j]);
                        }
                    }
                    Ok(energy(&acc))
                })
                .collect::<Result<_>>()?
        }
        ConvolutionMethod::Fft => {
            let conv = SpectralConvolver::new(data, weights);
            (0..grid.len())
                .into_par_iter()
                .map(|l| {
                    let g = kernel(&grid.point(l))?;
                    Ok(energy(&conv.convolve_sum(&g)))
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(IndicatorImage::new(grid.clone(), values, kind))
}

/// `acc += c · u`, elementwise and in index order.
#[inline]
fn axpy(acc: &mut [f64], c: f64, u: &[f64]) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the feature was detected at runtime.
        unsafe { axpy_avx2(acc, c, u) };
        return;
    }
    axpy_plain(acc, c, u);
}

#[inline(always)]
fn axpy_plain(acc: &mut [f64], c: f64, u: &[f64]) {
    for (a, &b) in acc.iter_mut().zip(u) {
        *a += c * b;
    }
}

/// Wider vectors only; without FMA contraction the results are bitwise
/// identical to [`axpy_plain`].
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
fn axpy_avx2(acc: &mut [f64], c: f64, u: &[f64]) {
    axpy_plain(acc, c, u);
}

/// Receiver-summed causal convolutions through zero-padded transforms of
/// length `2 N_t`. Kernels are transformed two at a time as the real and
/// imaginary parts of one complex sequence.
struct SpectralConvolver {
    steps: usize,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    data: Vec<Vec<Complex64>>,
}

impl SpectralConvolver {
    fn new(data: &WaveRecord, weights: &[f64]) -> Self {
        let steps = data.grid.steps;
        let len = 2 * steps;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let spectra = data_rows(data)
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                let mut buf = vec![Complex64::new(0.0, 0.0); len];
                for (b, u) in buf.iter_mut().zip(row) {
                    b.re = u * weights[i];
                }
                forward.process(&mut buf);
                buf
            })
            .collect();
        SpectralConvolver {
            steps,
            len,
            forward,
            inverse,
            data: spectra,
        }
    }

    fn convolve_sum(&self, kernels: &[Vec<f64>]) -> Vec<f64> {
        let len = self.len;
        let mut acc = vec![Complex64::new(0.0, 0.0); len];
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        let mut i = 0;
        while i < kernels.len() {
            let pair = i + 1 < kernels.len();
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            for j in 0..self.steps {
                buf[j].re = kernels[i][j];
                if pair {
                    buf[j].im = kernels[i + 1][j];
                }
            }
            self.forward.process(&mut buf);
            let (da, db) = (&self.data[i], self.data.get(i + 1));
            for f in 0..len {
                let zf = buf[f];
                let zr = buf[(len - f) % len].conj();
                let a = (zf + zr) * 0.5;
                acc[f] += da[f] * a;
                if pair {
                    let b = (zf - zr) * Complex64::new(0.0, -0.5);
                    acc[f] += db.expect("pair")[f] * b;
                }
            }
            i += 2;
        }
        self.inverse.process(&mut acc);
        let scale = 1.0 / len as f64;
        acc[..self.steps].iter().map(|c| c.re * scale).collect()
    }
}

/// `max |a - b| / max |b|` over two images on the same grid.
pub fn relative_image_difference(a: &IndicatorImage, b: &IndicatorImage) -> f64 {
    let diff = a
        .values
        .iter()
        .zip(&b.values)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = b.values.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    if scale == 0.0 {
        if diff == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        diff / scale
    }
}
