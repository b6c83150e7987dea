//! Free-particle propagation to the screen: exact spectral evolution in
//! units hbar = m = 1, plus the analytic Fraunhofer far-field map.

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qstate::EntangledState;
use crate::wavefunction::{Space, WaveFunction};

/// Cells next to the grid edge watched by the wraparound guard.
const GUARD_CELLS: usize = 4;
/// Relative probability allowed inside the guard band.
const GUARD_PROB: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exact spectral evolution on the source grid.
    FresnelExact,
    /// Analytic far field: the screen axis is the momentum axis.
    Fraunhofer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationSpec {
    pub mode: Mode,
    pub t: f64,
}

thread_local! {
    static FFT_CACHE: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

pub(crate) fn fft_in_place(data: &mut [C64], inverse: bool) {
    let plan = FFT_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry((data.len(), inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(data.len())
                } else {
                    planner.plan_fft_forward(data.len())
                }
            })
            .clone()
    });
    plan.process(data);
}

/// Per-bin spectral frequency 2 pi k' / (N dx) with k' in [-N/2, N/2).
fn bin_frequency(k: usize, n: usize, dx: f64) -> f64 {
    let kk = if k < n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    };
    2.0 * PI * kk / (n as f64 * dx)
}

/// Evolve a position-space wavefunction for time `t` under p^2/2:
/// multiply the momentum representation by e^{-i p^2 t / 2}.
///
/// Negative `t` is accepted so evolutions can be undone exactly.
pub fn evolve_free(psi: &WaveFunction, t: f64) -> Result<WaveFunction> {
    if psi.space != Space::Position {
        return Err(Error::InvalidConfig(
            "evolve_free expects a position-space wavefunction".into(),
        ));
    }
    let n = psi.grid.n_points;
    let dx = psi.grid.spacing();
    let mut data = psi.amplitudes.clone();
    fft_in_place(&mut data, false);
    for (k, a) in data.iter_mut().enumerate() {
        let p = bin_frequency(k, n, dx);
        *a *= C64::from_polar(1.0, -0.5 * p * p * t);
    }
    fft_in_place(&mut data, true);
    let inv_n = 1.0 / n as f64;
    for a in &mut data {
        *a *= inv_n;
    }
    let out = WaveFunction::new(psi.grid, data, Space::Position)?;
    let norm2 = out.norm2();
    let leaked = out.boundary_probability(GUARD_CELLS);
    if norm2 > 0.0 && leaked > GUARD_PROB * norm2 {
        return Err(Error::AliasingDetected {
            leaked,
            cells: GUARD_CELLS,
        });
    }
    Ok(out)
}

/// Exact transform to the conjugate grid, norm-preserving.
///
/// Position -> momentum uses the kernel e^{-ipx}/sqrt(2 pi); momentum ->
/// position uses e^{+ipx}/sqrt(2 pi). Applying it twice returns to the
/// original grid and amplitudes up to rounding.
pub fn conjugate_transform(psi: &WaveFunction) -> WaveFunction {
    let dg = psi.grid.spacing();
    let target = psi.grid.conjugate();
    let dq = target.spacing();
    let (sign, out_space) = match psi.space {
        Space::Position => (-1.0, Space::Momentum),
        Space::Momentum => (1.0, Space::Position),
    };
    // out[k] = dg/sqrt(2 pi) * e^{s i k dq g_min}
    //          * sum_m (in[m] e^{s i q_min g_m}) e^{s i 2 pi k m / N}
    let q_min = target.x_min;
    let mut data: Vec<C64> = psi
        .amplitudes
        .iter()
        .enumerate()
        .map(|(m, a)| a * C64::from_polar(1.0, sign * q_min * psi.grid.value(m)))
        .collect();
    fft_in_place(&mut data, sign > 0.0);
    let scale = dg / (2.0 * PI).sqrt();
    for (k, a) in data.iter_mut().enumerate() {
        *a *= C64::from_polar(scale, sign * k as f64 * dq * psi.grid.x_min);
    }
    WaveFunction {
        grid: target,
        amplitudes: data,
        space: out_space,
    }
}

fn occupied_width(psi: &WaveFunction) -> f64 {
    let probs: Vec<f64> = psi.amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let max = probs.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let lo = probs.iter().position(|&p| p > 1e-12 * max).unwrap();
    let hi = probs.iter().rposition(|&p| p > 1e-12 * max).unwrap();
    (hi - lo) as f64 * psi.grid.spacing()
}

/// Far-field threshold for flight time t: the source must look point-like
/// from the screen, t >= w^2 / (2 pi) with w the occupied source width.
pub fn far_field_threshold(psi: &WaveFunction) -> f64 {
    let w = occupied_width(psi);
    w * w / (2.0 * PI)
}

/// Analytic Fraunhofer far field: the unit-normalized momentum
/// representation. The screen coordinate at flight time t is x = p t.
pub fn to_far_field(psi: &WaveFunction, t: f64) -> Result<WaveFunction> {
    if psi.space != Space::Position {
        return Err(Error::InvalidConfig(
            "to_far_field expects a position-space wavefunction".into(),
        ));
    }
    let threshold = far_field_threshold(psi);
    if !(t >= threshold) {
        return Err(Error::NotFarField { t, threshold });
    }
    Ok(conjugate_transform(psi).normalized())
}

/// Far-field threshold for an entangled source, judged against the
/// combined support of all components.
pub fn entangled_far_field_threshold(state: &EntangledState) -> f64 {
    let mut total = WaveFunction::zeros(state.grid(), Space::Position);
    for c in &state.components {
        for (t, a) in total.amplitudes.iter_mut().zip(&c.amplitudes) {
            *t += C64::new(a.norm(), 0.0);
        }
    }
    far_field_threshold(&total)
}

/// Apply the chosen propagation to every component of an entangled state.
/// The detector is untouched, so this commutes with any basis change.
pub fn evolve_entangled(state: &EntangledState, spec: &PropagationSpec) -> Result<EntangledState> {
    let components = match spec.mode {
        Mode::FresnelExact => state
            .components
            .iter()
            .map(|c| evolve_free(c, spec.t))
            .collect::<Result<Vec<_>>>()?,
        Mode::Fraunhofer => {
            // check the far-field criterion against the total source extent
            let threshold = entangled_far_field_threshold(state);
            if !(spec.t >= threshold) {
                return Err(Error::NotFarField {
                    t: spec.t,
                    threshold,
                });
            }
            // norm-preserving per component so outcome probabilities survive
            state.components.iter().map(conjugate_transform).collect()
        }
    };
    Ok(EntangledState {
        components,
        basis_tag: state.basis_tag.clone(),
    })
}
