//! Indicator images on a sampling grid, normalization and CSV I/O.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::forward::sci;
use crate::scene::{Point, SamplingGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorKind {
    I1,
    I2tilde,
    /// `I₂` with the `√|x - y₀|` receiver weight for a known `y₀`.
    I2,
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndicatorKind::I1 => "I1",
            IndicatorKind::I2tilde => "I2tilde",
            IndicatorKind::I2 => "I2",
        })
    }
}

impl std::str::FromStr for IndicatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I1" => Ok(IndicatorKind::I1),
            "I2tilde" => Ok(IndicatorKind::I2tilde),
            "I2" => Ok(IndicatorKind::I2),
            other => Err(Error::Format {
                what: "image",
                msg: format!("unknown indicator kind `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorImage {
    pub grid: SamplingGrid,
    /// One value per grid point, row-major.
    pub values: Vec<f64>,
    pub kind: IndicatorKind,
    /// `(min, max)` of the raw values once normalized.
    pub normalization: Option<(f64, f64)>,
    /// Normalization of a constant image.
    pub degenerate: bool,
    /// Sampling points whose probe field vanished identically (set to 0).
    pub zero_probe: Vec<usize>,
}

impl IndicatorImage {
    pub fn new(grid: SamplingGrid, values: Vec<f64>, kind: IndicatorKind) -> Self {
        IndicatorImage {
            grid,
            values,
            kind,
            normalization: None,
            degenerate: false,
            zero_probe: Vec::new(),
        }
    }

    /// Index of the largest value; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (l, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = l;
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn point(&self, l: usize) -> Point {
        self.grid.point(l)
    }

    /// Strict local maxima over the full `3^d - 1` neighbourhood (plateaus
    /// resolved towards the lowest index), greedily thinned so that accepted
    /// peaks are at least `min_separation` apart, strongest first.
    pub fn local_maxima(&self, min_separation: f64) -> Vec<usize> {
        let d = self.grid.dim();
        let counts = &self.grid.counts;
        let mut offsets: Vec<Vec<isize>> = vec![vec![]];
        for _ in 0..d {
            offsets = offsets
                .into_iter()
                .flat_map(|o| {
                    (-1..=1).map(move |s| {
                        let mut o = o.clone();
                        o.push(s);
                        o
                    })
                })
                .collect();
        }
        offsets.retain(|o| o.iter().any(|&s| s != 0));
        let mut peaks: Vec<usize> = (0..self.values.len())
            .filter(|&l| {
                let v = self.values[l];
                let idx = self.grid.unravel(l);
                offsets.iter().all(|o| {
                    let mut nb = Vec::with_capacity(d);
                    for a in 0..d {
                        let j = idx[a] as isize + o[a];
                        if j < 0 || j >= counts[a] as isize {
                            return true;
                        }
                        nb.push(j as usize);
                    }
                    let m = self.grid.ravel(&nb);
                    v > self.values[m] || (v == self.values[m] && l < m)
                })
            })
            .collect();
        peaks.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        let mut kept: Vec<usize> = Vec::new();
        for l in peaks {
            let p = self.grid.point(l);
            if kept.iter().all(|&q| (self.grid.point(q) - p).norm() >= min_separation) {
                kept.push(l);
            }
        }
        kept
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let dims: Vec<String> = self.grid.counts.iter().map(|n| n.to_string()).collect();
        let bx: Vec<String> = (0..self.grid.dim())
            .map(|a| format!("{}..{}", self.grid.lower[a], self.grid.upper[a]))
            .collect();
        writeln!(
            w,
            "# mowave-image v1, kind={}, dims={}, box={}",
            self.kind,
            dims.join(","),
            bx.join(",")
        )?;
        let mut line = String::new();
        for (l, v) in self.values.iter().enumerate() {
            line.clear();
            let p = self.grid.point(l);
            for a in 0..self.grid.dim() {
                line.push_str(&sci(p[a]));
                line.push(',');
            }
            line.push_str(&sci(*v));
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let bad = |msg: String| Error::Format { what: "image", msg };
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
        let rest = header
            .strip_prefix("# mowave-image v1, kind=")
            .ok_or_else(|| bad("missing header".into()))?;
        let (kind, rest) = rest
            .split_once(", dims=")
            .ok_or_else(|| bad("missing dims".into()))?;
        let (dims, bx) = rest
            .split_once(", box=")
            .ok_or_else(|| bad("missing box".into()))?;
        let kind: IndicatorKind = kind.parse()?;
        let counts = dims
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|e| bad(format!("dims: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for axis in bx.split(',') {
            let (lo, hi) = axis
                .split_once("..")
                .ok_or_else(|| bad(format!("bad box entry `{axis}`")))?;
            lower.push(lo.parse::<f64>().map_err(|e| bad(format!("box: {e}")))?);
            upper.push(hi.parse::<f64>().map_err(|e| bad(format!("box: {e}")))?);
        }
        let grid = SamplingGrid::new(lower, upper, counts)
            .map_err(|e| bad(e.to_string()))?;
        let mut values = Vec::with_capacity(grid.len());
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let last = line.rsplit(',').next().unwrap_or("");
            values.push(last.trim().parse::<f64>().map_err(|e| bad(format!("`{last}`: {e}")))?);
        }
        if values.len() != grid.len() {
            return Err(bad(format!("{} values for {} grid points", values.len(), grid.len())));
        }
        Ok(IndicatorImage::new(grid, values, kind))
    }
}

/// Affine map of the finite values onto `[0, 1]`; a constant image becomes
/// all 0.5 with the degenerate flag set.
pub fn normalize_image(img: &IndicatorImage) -> Result<IndicatorImage> {
    let finite = img.values.iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return Err(Error::EmptyData);
    }
    let mut out = img.clone();
    out.normalization = Some((lo, hi));
    if hi == lo {
        out.values.iter_mut().for_each(|v| *v = 0.5);
        out.degenerate = true;
    } else {
        let span = hi - lo;
        out.values.iter_mut().for_each(|v| *v = ((*v - lo) / span).clamp(0.0, 1.0));
        out.degenerate = false;
    }
    Ok(out)
}
