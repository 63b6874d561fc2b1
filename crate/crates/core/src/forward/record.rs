//! Sampled wave fields and their CSV form.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scene::{Point, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Incident,
    Scattered,
    NoisyScattered,
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordKind::Incident => "incident",
            RecordKind::Scattered => "scattered",
            RecordKind::NoisyScattered => "noisy_scattered",
        })
    }
}

impl FromStr for RecordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "incident" => Ok(RecordKind::Incident),
            "scattered" => Ok(RecordKind::Scattered),
            "noisy_scattered" => Ok(RecordKind::NoisyScattered),
            other => Err(Error::Format {
                what: "record",
                msg: format!("unknown kind `{other}`"),
            }),
        }
    }
}

/// Field samples `values[[i, k]]` at point `i` and time `t_k`, `k = 0..=N_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveRecord {
    pub kind: RecordKind,
    /// Receivers, or panel centroids for an incident record.
    pub points: Vec<Point>,
    /// Quadrature weight `Δs` of each point.
    pub weights: Vec<f64>,
    /// Spatial dimension of `points` (2 or 3).
    pub dim: usize,
    pub grid: TimeGrid,
    pub sound_speed: f64,
    pub values: Array2<f64>,
    pub noise_level: f64,
    pub seed: u64,
}

impl WaveRecord {
    pub fn zeros(
        kind: RecordKind,
        points: Vec<Point>,
        weights: Vec<f64>,
        grid: TimeGrid,
        sound_speed: f64,
    ) -> Self {
        let dim = infer_dim(&points);
        WaveRecord {
            kind,
            values: Array2::zeros((points.len(), grid.len())),
            points,
            weights,
            dim,
            grid,
            sound_speed,
            noise_level: 0.0,
            seed: 0,
        }
    }

    pub(crate) fn from_rows(
        kind: RecordKind,
        points: Vec<Point>,
        weights: Vec<f64>,
        grid: TimeGrid,
        sound_speed: f64,
        rows: Vec<Vec<f64>>,
    ) -> Self {
        let mut rec = WaveRecord::zeros(kind, points, weights, grid, sound_speed);
        for (i, row) in rows.into_iter().enumerate() {
            for (k, v) in row.into_iter().enumerate() {
                rec.values[[i, k]] = v;
            }
        }
        rec
    }

    pub fn receivers(&self) -> usize {
        self.points.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.values.mapv_inplace(|v| alpha * v);
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# mowave-record v1, kind={}, c={}, Nt={}, dt={}, Nm={}, sigma={}, seed={}",
            self.kind,
            sci(self.sound_speed),
            self.grid.steps,
            sci(self.grid.dt()),
            self.receivers(),
            sci(self.noise_level),
            self.seed
        )?;
        let coords: Vec<String> = self
            .points
            .iter()
            .flat_map(|p| p.iter().take(self.dim).map(|&c| sci(c)).collect::<Vec<_>>())
            .collect();
        writeln!(w, "{}", coords.join(","))?;
        let mut line = String::new();
        for k in 0..self.grid.len() {
            line.clear();
            for i in 0..self.receivers() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&sci(self.values[[i, k]]));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Reads a record written by [`WaveRecord::write_csv`]. The file carries
    /// no quadrature weights, so every weight is set to 1.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let bad = |msg: String| Error::Format { what: "record", msg };
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
        let body = header
            .strip_prefix("# mowave-record v1, ")
            .ok_or_else(|| bad("missing header".into()))?;
        let mut kind = None;
        let (mut c, mut nt, mut dt, mut nm, mut sigma, mut seed) = (None, None, None, None, None, None);
        for kv in body.split(", ") {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("bad header field `{kv}`")))?;
            let num = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("{k}: {e}")));
            match k {
                "kind" => kind = Some(v.parse::<RecordKind>()?),
                "c" => c = Some(num(v)?),
                "Nt" => nt = Some(v.parse::<usize>().map_err(|e| bad(format!("Nt: {e}")))?),
                "dt" => dt = Some(num(v)?),
                "Nm" => nm = Some(v.parse::<usize>().map_err(|e| bad(format!("Nm: {e}")))?),
                "sigma" => sigma = Some(num(v)?),
                "seed" => seed = Some(v.parse::<u64>().map_err(|e| bad(format!("seed: {e}")))?),
                _ => return Err(bad(format!("unknown header field `{k}`"))),
            }
        }
        let miss = |f: &str| bad(format!("header lacks `{f}`"));
        let (kind, c, nt, dt, nm) = (
            kind.ok_or_else(|| miss("kind"))?,
            c.ok_or_else(|| miss("c"))?,
            nt.ok_or_else(|| miss("Nt"))?,
            dt.ok_or_else(|| miss("dt"))?,
            nm.ok_or_else(|| miss("Nm"))?,
        );
        let coords = parse_row(&lines.next().ok_or_else(|| miss("coordinates"))??)?;
        if nm == 0 || coords.len() % nm != 0 || !(2..=3).contains(&(coords.len() / nm)) {
            return Err(bad(format!("{} coordinates for {nm} receivers", coords.len())));
        }
        let dim = coords.len() / nm;
        let points = coords
            .chunks(dim)
            .map(|ch| Point::new(ch[0], ch[1], if dim == 3 { ch[2] } else { 0.0 }))
            .collect();
        let grid = TimeGrid::new(dt * nt as f64, nt)?;
        let mut rec = WaveRecord::zeros(kind, points, vec![1.0; nm], grid, c);
        rec.dim = dim;
        rec.noise_level = sigma.unwrap_or(0.0);
        rec.seed = seed.unwrap_or(0);
        for k in 0..=nt {
            let row = parse_row(&lines.next().ok_or_else(|| bad(format!("missing row {k}")))??)?;
            if row.len() != nm {
                return Err(bad(format!("row {k} has {} values, expected {nm}", row.len())));
            }
            for (i, v) in row.into_iter().enumerate() {
                rec.values[[i, k]] = v;
            }
        }
        Ok(rec)
    }
}

fn infer_dim(points: &[Point]) -> usize {
    if points.iter().any(|p| p.z != 0.0) {
        3
    } else {
        2
    }
}

fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|e| Error::Format {
                what: "record",
                msg: format!("`{s}`: {e}"),
            })
        })
        .collect()
}

/// 17 significant digits.
pub(crate) fn sci(v: f64) -> String {
    format!("{v:.16e}")
}
