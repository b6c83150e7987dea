//! Complex amplitudes on a uniform 1-D grid.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Position,
    Momentum,
}

/// A single-particle wavefunction sampled on a [`Grid`].
///
/// Integrals are discretized as sums times the grid spacing, so a state
/// with `sum |amp|^2 * dx = 1` is unit-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: Grid,
    pub amplitudes: Vec<C64>,
    pub space: Space,
}

impl WaveFunction {
    pub fn new(grid: Grid, amplitudes: Vec<C64>, space: Space) -> Result<Self> {
        if amplitudes.len() != grid.n_points {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points,
                got: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidConfig("non-finite amplitude".into()));
        }
        Ok(WaveFunction {
            grid,
            amplitudes,
            space,
        })
    }

    pub fn zeros(grid: Grid, space: Space) -> Self {
        WaveFunction {
            amplitudes: vec![C64::new(0.0, 0.0); grid.n_points],
            grid,
            space,
        }
    }

    /// sum |amp|^2 * dx
    pub fn norm2(&self) -> f64 {
        let dx = self.grid.spacing();
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    /// <self|other> = sum conj(self) * other * dx
    pub fn inner(&self, other: &WaveFunction) -> Result<C64> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let dx = self.grid.spacing();
        let s: C64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * dx)
    }

    pub fn normalized(&self) -> WaveFunction {
        let n = self.norm();
        let mut out = self.clone();
        if n > 0.0 {
            for a in &mut out.amplitudes {
                *a /= n;
            }
        }
        out
    }

    pub fn scaled(&self, c: C64) -> WaveFunction {
        let mut out = self.clone();
        for a in &mut out.amplitudes {
            *a *= c;
        }
        out
    }

    /// Multiply by the plane-wave factor e^{i k x}.
    pub fn kicked(&self, k: f64) -> WaveFunction {
        let mut out = self.clone();
        for (i, a) in out.amplitudes.iter_mut().enumerate() {
            let x = self.grid.value(i);
            *a *= C64::from_polar(1.0, k * x);
        }
        out
    }

    /// Probability-weighted mean coordinate.
    pub fn centroid(&self) -> f64 {
        let dx = self.grid.spacing();
        let w: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx;
        if w == 0.0 {
            return 0.5 * (self.grid.x_min + self.grid.x_max);
        }
        let s: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| self.grid.value(i) * a.norm_sqr())
            .sum::<f64>()
            * dx;
        s / w
    }

    /// Probability within `cells` grid cells of either boundary.
    pub fn boundary_probability(&self, cells: usize) -> f64 {
        let n = self.grid.n_points;
        let dx = self.grid.spacing();
        let m = cells.min(n / 2);
        let lo: f64 = self.amplitudes[..m].iter().map(|a| a.norm_sqr()).sum();
        let hi: f64 = self.amplitudes[n - m..].iter().map(|a| a.norm_sqr()).sum();
        (lo + hi) * dx
    }
}
