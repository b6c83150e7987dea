//! Uniform 1-D grids for position- and momentum-space wavefunctions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform grid of `n_points` samples from `x_min` to `x_max` inclusive.
///
/// `n_points` must be a power of two so spectral propagation can use a
/// radix-2 FFT directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "grid n_points must be a power of two >= 2, got {n_points}"
            )));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn span(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn value(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.value(i))
    }

    /// The conjugate (momentum) grid for an FFT over this grid, with
    /// spacing dp = 2 pi / (N dx) and the origin scaled by dp/dx so that
    /// conjugation is an involution: `g.conjugate().conjugate()` carries
    /// the same sample points as `g`.
    pub fn conjugate(&self) -> Grid {
        let n = self.n_points;
        let dx = self.spacing();
        let dp = 2.0 * std::f64::consts::PI / (n as f64 * dx);
        let p_min = self.x_min * dp / dx;
        Grid {
            x_min: p_min,
            x_max: p_min + (n - 1) as f64 * dp,
            n_points: n,
        }
    }

    /// Grids are compatible when they carry identical sample points.
    pub fn compatible(&self, other: &Grid) -> bool {
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= 1e-12 * self.span().max(1.0)
            && (self.x_max - other.x_max).abs() <= 1e-12 * self.span().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::new(0.0, 1.0, 1000).is_err());
        assert!(Grid::new(0.0, 1.0, 1024).is_ok());
    }

    #[test]
    fn rejects_empty_span() {
        assert!(Grid::new(1.0, 1.0, 16).is_err());
        assert!(Grid::new(2.0, 1.0, 16).is_err());
    }

    #[test]
    fn conjugate_grid_is_parseval_matched() {
        let g = Grid::new(-4.0, 5.0, 4096).unwrap();
        let p = g.conjugate();
        let expected = 2.0 * std::f64::consts::PI / (g.n_points as f64 * g.spacing());
        assert!((p.spacing() - expected).abs() < 1e-12);
        // origin keeps the same cell index on both grids
        assert!((p.x_min / p.spacing() - g.x_min / g.spacing()).abs() < 1e-9);
    }

    #[test]
    fn conjugate_is_involutive() {
        for (lo, hi) in [(-4.0, 5.0), (-6.0, 6.0), (0.5, 11.5)] {
            let g = Grid::new(lo, hi, 1024).unwrap();
            let back = g.conjugate().conjugate();
            assert!(back.compatible(&g), "round trip moved {g:?} to {back:?}");
        }
    }
}
