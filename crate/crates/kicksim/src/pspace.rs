//! The momentum-space dual: a particle prepared in two narrow momentum
//! peaks entangled with a which-way detector. Erasing the which-peak
//! record in the Fourier basis relates the two conditional states by a
//! constant *position* displacement phase e^{i x0 p}, x0 = pi / (p2 - p1)
//! — the mirror image of the momentum kick for position slits.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::qstate::{EntangledState, OVERLAP_TOL, WHICH_WAY_TAG};
use crate::wavefunction::{Space, WaveFunction};

/// Two Gaussian momentum peaks of amplitude width `width` at p1 < p2.
///
/// The peaks must be narrow against their separation (width at most
/// (p2 - p1)/8) so the which-way overlap stays negligible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumPeaks {
    pub p1: f64,
    pub p2: f64,
    pub width: f64,
}

impl MomentumPeaks {
    pub fn new(p1: f64, p2: f64, width: f64) -> Result<Self> {
        if !(p2 > p1) {
            return Err(Error::DegenerateMomenta);
        }
        let sep = p2 - p1;
        if !(width > 0.0 && width <= sep / 8.0) {
            return Err(Error::InvalidConfig(format!(
                "peak width must satisfy 0 < width <= (p2 - p1)/8, got width={width}, separation={sep}"
            )));
        }
        Ok(MomentumPeaks { p1, p2, width })
    }

    pub fn separation(&self) -> f64 {
        self.p2 - self.p1
    }

    /// Momentum grid spanning both peaks with generous margin, fine
    /// enough to resolve the peak width.
    pub fn default_grid(&self) -> Grid {
        let sep = self.separation();
        Grid::new(self.p1 - 4.0 * sep, self.p2 + 4.0 * sep, 4096).expect("default grid construction")
    }
}

/// Unit-normalized Gaussian momentum peak centered at `p0`.
fn peak_state(grid: &Grid, p0: f64, width: f64) -> Result<WaveFunction> {
    let amps = grid
        .values()
        .map(|p| C64::new((-(p - p0).powi(2) / (2.0 * width * width)).exp(), 0.0))
        .collect();
    WaveFunction::new(*grid, amps, Space::Momentum).map(|w| w.normalized())
}

/// Which-way entangled state of the two momentum peaks, expressed in the
/// momentum representation: component_j = phi_{p_j} / sqrt(2).
pub fn make_momentum_state(peaks: &MomentumPeaks, grid: &Grid) -> Result<EntangledState> {
    let dp = grid.spacing();
    if dp > peaks.width / 8.0 {
        return Err(Error::GridTooCoarse {
            spacing: dp,
            limit: peaks.width / 8.0,
        });
    }
    let margin = 8.0 * peaks.width;
    if grid.x_min > peaks.p1 - margin || grid.x_max < peaks.p2 + margin {
        return Err(Error::GridTooSmall);
    }
    let a = peak_state(grid, peaks.p1, peaks.width)?;
    let b = peak_state(grid, peaks.p2, peaks.width)?;
    let ov = a.inner(&b)?.norm();
    if ov >= OVERLAP_TOL {
        return Err(Error::OverlapTooLarge { overlap: ov });
    }
    let half = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(EntangledState {
        components: vec![a.scaled(half), b.scaled(half)],
        basis_tag: WHICH_WAY_TAG.to_string(),
    })
}

/// The position displacement dual to the two-slit momentum kick:
/// x0 = pi / (p2 - p1), the smallest shift whose phase e^{i x0 p}
/// differs by exactly pi between the two peaks.
pub fn position_kick_value(peaks: &MomentumPeaks) -> Result<f64> {
    let sep = peaks.separation();
    if !(sep > 0.0) || !sep.is_finite() {
        return Err(Error::DegenerateMomenta);
    }
    Ok(PI / sep)
}

/// The position-kick representation of the erased state, in the Fourier
/// detector basis: component_0 = base / sqrt(2) and component_1 =
/// e^{-i p1 x0} e^{i x0 p} base / sqrt(2), with `base` the full
/// two-peak superposition in the momentum representation.
pub fn position_kick_representation(
    base: &WaveFunction,
    peaks: &MomentumPeaks,
) -> Result<EntangledState> {
    if base.space != Space::Momentum {
        return Err(Error::InvalidConfig(
            "position_kick_representation expects a momentum-space base".into(),
        ));
    }
    let x0 = position_kick_value(peaks)?;
    let half = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    // kicked() multiplies by e^{i x0 g} pointwise; on a momentum grid
    // that is the position-displacement phase e^{i x0 p}
    let displaced = base
        .kicked(x0)
        .scaled(half * C64::from_polar(1.0, -peaks.p1 * x0));
    Ok(EntangledState {
        components: vec![base.scaled(half), displaced],
        basis_tag: "fourier-2".to_string(),
    })
}
