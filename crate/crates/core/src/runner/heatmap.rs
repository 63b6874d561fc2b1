//! PNG heatmaps of indicator images.
//!
//! Colormap: values in `[0, 1]` are mapped piecewise-linearly through
//! `0 → (0,0,128)`, `0.5 → (0,192,0)`, `1 → (255,255,0)`, each channel rounded
//! to the nearest integer. Each grid point becomes a `cell × cell` block; the
//! data region is surrounded by a white margin of `margin` pixels. 2-D images
//! put the first axis to the right and the second upwards. 3-D images show
//! the three mid-slices `z = z_mid`, `y = y_mid` and `x = x_mid` side by side,
//! separated by the margin.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::error::Result;
use crate::imaging::{normalize_image, IndicatorImage};
use crate::scene::{Point, SamplingGrid};

pub const DEFAULT_MARGIN: u32 = 4;

const KNOTS: [[f64; 3]; 3] = [[0.0, 0.0, 128.0], [0.0, 192.0, 0.0], [255.0, 255.0, 0.0]];
const BACKGROUND: [u8; 3] = [255, 255, 255];
const BOUNDARY: [u8; 3] = [255, 255, 255];
const TRAJECTORY: [u8; 3] = [255, 0, 255];
const RECEIVER: [u8; 3] = [255, 0, 0];

pub fn colormap(v: f64) -> [u8; 3] {
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    let (a, b, f) = if v <= 0.5 {
        (KNOTS[0], KNOTS[1], v / 0.5)
    } else {
        (KNOTS[1], KNOTS[2], (v - 0.5) / 0.5)
    };
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (a[c] + (b[c] - a[c]) * f).round() as u8;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeatmapStyle {
    /// Pixels per grid point along each axis.
    pub cell: u32,
    pub margin: u32,
}

impl Default for HeatmapStyle {
    fn default() -> Self {
        HeatmapStyle {
            cell: 1,
            margin: DEFAULT_MARGIN,
        }
    }
}

/// Scene geometry drawn over 2-D heatmaps; clipped to the data region.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overlay {
    pub trajectory: Vec<Point>,
    pub receivers: Vec<Point>,
    pub boundaries: Vec<Vec<Point>>,
}

/// An RGB raster, row-major from the top-left corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl Raster {
    fn new(width: u32, height: u32) -> Self {
        let mut data = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            data.extend_from_slice(&BACKGROUND);
        }
        Raster { width, height, data }
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let o = ((y * self.width + x) * 3) as usize;
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    fn set(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let o = ((y * self.width + x) * 3) as usize;
        self.data[o..o + 3].copy_from_slice(&rgb);
    }

    fn fill(&mut self, x: u32, y: u32, size: u32, rgb: [u8; 3]) {
        for dy in 0..size {
            for dx in 0..size {
                self.set(x + dx, y + dy, rgb);
            }
        }
    }
}

/// Rasterizes `img` (normalized first unless it already is).
pub fn heatmap_raster(img: &IndicatorImage, style: HeatmapStyle, overlay: Option<&Overlay>) -> Result<Raster> {
    let img = if img.normalization.is_some() {
        img.clone()
    } else {
        normalize_image(img)?
    };
    let g = &img.grid;
    let (cell, m) = (style.cell.max(1), style.margin);
    let n: Vec<u32> = g.counts.iter().map(|&c| c as u32).collect();
    if g.dim() == 2 {
        let mut r = Raster::new(2 * m + n[0] * cell, 2 * m + n[1] * cell);
        for l in 0..g.len() {
            let idx = g.unravel(l);
            let (i, j) = (idx[0] as u32, idx[1] as u32);
            r.fill(m + i * cell, m + (n[1] - 1 - j) * cell, cell, colormap(img.values[l]));
        }
        if let Some(ov) = overlay {
            draw_overlay(&mut r, g, style, ov);
        }
        return Ok(r);
    }
    let mid: Vec<usize> = g.counts.iter().map(|&c| c / 2).collect();
    // (horizontal axis, vertical axis, fixed axis) per slice.
    let slices = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    let width = m + slices.iter().map(|&(h, _, _)| n[h] * cell + m).sum::<u32>();
    let height = 2 * m + slices.iter().map(|&(_, v, _)| n[v] * cell).max().unwrap_or(0);
    let mut r = Raster::new(width, height);
    let mut x0 = m;
    for &(h, v, fixed) in &slices {
        for i in 0..g.counts[h] {
            for j in 0..g.counts[v] {
                let mut idx = vec![0; 3];
                idx[h] = i;
                idx[v] = j;
                idx[fixed] = mid[fixed];
                let val = img.values[g.ravel(&idx)];
                r.fill(x0 + i as u32 * cell, m + (n[v] - 1 - j as u32) * cell, cell, colormap(val));
            }
        }
        x0 += n[h] * cell + m;
    }
    Ok(r)
}

fn draw_overlay(r: &mut Raster, g: &SamplingGrid, style: HeatmapStyle, ov: &Overlay) {
    let (sx, sy) = (g.spacing(0), g.spacing(1));
    if sx == 0.0 || sy == 0.0 {
        return;
    }
    let (cell, m) = (style.cell.max(1) as f64, style.margin as f64);
    let (nx, ny) = (g.counts[0] as f64, g.counts[1] as f64);
    let to_px = |p: &Point| {
        (
            m + ((p.x - g.lower[0]) / sx + 0.5) * cell,
            m + (ny - 0.5 - (p.y - g.lower[1]) / sy) * cell,
        )
    };
    let region = (m, m + nx * cell, m, m + ny * cell);
    let plot = |r: &mut Raster, (x, y): (f64, f64), rgb| {
        if x >= region.0 && x < region.1 && y >= region.2 && y < region.3 {
            r.set(x as u32, y as u32, rgb);
        }
    };
    let polyline = |r: &mut Raster, pts: &[Point], rgb| {
        for w in pts.windows(2) {
            let (a, b) = (to_px(&w[0]), to_px(&w[1]));
            let len = (b.0 - a.0).hypot(b.1 - a.1);
            let steps = (2.0 * len).ceil().max(1.0) as usize;
            for s in 0..=steps {
                let f = s as f64 / steps as f64;
                plot(r, (a.0 + (b.0 - a.0) * f, a.1 + (b.1 - a.1) * f), rgb);
            }
        }
    };
    for b in &ov.boundaries {
        polyline(r, b, BOUNDARY);
    }
    polyline(r, &ov.trajectory, TRAJECTORY);
    let arm = cell.max(2.0);
    for p in &ov.receivers {
        let (x, y) = to_px(p);
        for d in [-arm, -arm / 2.0, 0.0, arm / 2.0, arm] {
            plot(r, (x + d, y), RECEIVER);
            plot(r, (x, y + d), RECEIVER);
        }
    }
}

/// Writes an 8-bit RGB PNG with optional `tEXt` entries.
pub fn write_png(raster: &Raster, path: &Path, text: &[(&str, &str)]) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    let mut enc = png::Encoder::new(file, raster.width, raster.height);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    for (k, v) in text {
        enc.add_text_chunk(k.to_string(), v.to_string())?;
    }
    let mut w = enc.write_header()?;
    w.write_image_data(&raster.data)?;
    w.finish()?;
    Ok(())
}

pub fn render_heatmap(img: &IndicatorImage, path: &Path) -> Result<()> {
    render_heatmap_with(img, path, HeatmapStyle::default(), None, &[])
}

pub fn render_heatmap_with(
    img: &IndicatorImage,
    path: &Path,
    style: HeatmapStyle,
    overlay: Option<&Overlay>,
    text: &[(&str, &str)],
) -> Result<()> {
    write_png(&heatmap_raster(img, style, overlay)?, path, text)
}
