//! Time and sampling grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::Point;

/// `t_k = kΔt`, `k = 0..=steps`, `Δt = total_time / steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub total_time: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(total_time: f64, steps: usize) -> Result<Self> {
        let g = TimeGrid { total_time, steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_time > 0.0) {
            return Err(Error::field("time_grid.total_time", "must be positive"));
        }
        if self.steps == 0 {
            return Err(Error::field("time_grid.steps", "must be positive"));
        }
        Ok(())
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    /// Number of samples, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }
}

/// Tensor grid of `counts[a]` equispaced points on `[lower[a], upper[a]]`
/// (endpoints included). Points are ordered row-major, first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingGrid {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub counts: Vec<usize>,
}

impl SamplingGrid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let g = SamplingGrid {
            lower,
            upper,
            counts,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.counts.len();
        if !(2..=3).contains(&d) || self.lower.len() != d || self.upper.len() != d {
            return Err(Error::field(
                "sampling_grid",
                "lower, upper and counts must all have 2 or 3 entries",
            ));
        }
        for a in 0..d {
            if self.counts[a] == 0 {
                return Err(Error::field("sampling_grid.counts", "must be positive"));
            }
            if !(self.upper[a] >= self.lower[a]) {
                return Err(Error::field("sampling_grid.upper", "must not be below lower"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of index `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let n = self.counts[axis];
        if n == 1 {
            0.5 * (self.lower[axis] + self.upper[axis])
        } else {
            self.lower[axis] + (self.upper[axis] - self.lower[axis]) * i as f64 / (n - 1) as f64
        }
    }

    /// Grid spacing along `axis` (zero for a single point).
    pub fn spacing(&self, axis: usize) -> f64 {
        let n = self.counts[axis];
        if n <= 1 {
            0.0
        } else {
            (self.upper[axis] - self.lower[axis]) / (n - 1) as f64
        }
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    /// Multi-index of linear index `l`.
    pub fn unravel(&self, mut l: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = l % self.counts[a];
            l /= self.counts[a];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn point(&self, l: usize) -> Point {
        let idx = self.unravel(l);
        let mut p = Point::zeros();
        for (a, &i) in idx.iter().enumerate() {
            p[a] = self.coord(a, i);
        }
        p
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|l| self.point(l)).collect()
    }
}
