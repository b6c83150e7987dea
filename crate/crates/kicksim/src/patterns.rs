//! Screen intensity patterns, fringe visibility, and fringe shifts.
//!
//! Visibility is the Michelson contrast (I_max - I_min)/(I_max + I_min)
//! of the envelope-normalized pattern on a central window of six fringe
//! periods. It is computed by demodulating the window at the fringe
//! frequency, which equals the Michelson value for sinusoidal fringes
//! and is clamped to [0, 1] when higher grating harmonics are present.

use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::propagate::fft_in_place;
use crate::qstate::EntangledState;

/// Nonnegative screen intensity plus its integrated probability.
///
/// `weight` is 1 for an unconditioned pattern and the outcome
/// probability for a conditioned one; patterns are never renormalized,
/// so summing conditioned patterns reproduces the unconditioned one
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub grid: Grid,
    pub intensity: Vec<f64>,
    pub weight: f64,
}

impl Pattern {
    pub fn new(grid: Grid, intensity: Vec<f64>) -> Result<Self> {
        if intensity.len() != grid.n_points {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points,
                got: intensity.len(),
            });
        }
        if intensity.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidConfig(
                "pattern intensity must be finite and nonnegative".into(),
            ));
        }
        let weight = intensity.iter().sum::<f64>() * grid.spacing();
        Ok(Pattern {
            grid,
            intensity,
            weight,
        })
    }

    pub fn centroid(&self) -> f64 {
        if self.weight <= 0.0 {
            return 0.5 * (self.grid.x_min + self.grid.x_max);
        }
        let s: f64 = self
            .intensity
            .iter()
            .enumerate()
            .map(|(i, &v)| self.grid.value(i) * v)
            .sum::<f64>()
            * self.grid.spacing();
        s / self.weight
    }

    /// Pointwise sum; grids must match.
    pub fn add(&self, other: &Pattern) -> Result<Pattern> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let intensity = self
            .intensity
            .iter()
            .zip(&other.intensity)
            .map(|(a, b)| a + b)
            .collect();
        Pattern::new(self.grid, intensity)
    }
}

/// The detector-basis-independent marginal: pointwise sum of
/// |component_k|^2 over the current orthonormal basis.
pub fn intensity(state: &EntangledState) -> Result<Pattern> {
    let grid = state.grid();
    for c in &state.components {
        if !c.grid.compatible(&grid) {
            return Err(Error::GridMismatch);
        }
    }
    let mut out = vec![0.0; grid.n_points];
    for c in &state.components {
        for (o, a) in out.iter_mut().zip(&c.amplitudes) {
            *o += a.norm_sqr();
        }
    }
    Pattern::new(grid, out)
}

/// |component_j|^2 weighted by the outcome probability.
pub fn conditioned_pattern(state: &EntangledState, j: usize) -> Result<Pattern> {
    if j >= state.n() {
        return Err(Error::IndexOutOfRange {
            index: j,
            n: state.n(),
        });
    }
    let c = &state.components[j];
    Pattern::new(c.grid, c.amplitudes.iter().map(|a| a.norm_sqr()).collect())
}

/// Fringe contrast, period, and shift (in periods, relative to a
/// reference pattern) on the central analysis window.
#[derive(Debug, Clone, Serialize)]
pub struct FringeReport {
    pub visibility: f64,
    /// None when no fringe frequency is detectable.
    pub period: Option<f64>,
    /// Shift of this pattern relative to the reference, in units of one
    /// period, folded into (-1/2, 1/2]. None without a usable reference.
    pub shift: Option<f64>,
    /// Analysis window in screen coordinates.
    pub window: (f64, f64),
}

/// Fold into (-1/2, 1/2], with a tiny bias so an exact half-period
/// shift reports +1/2 rather than jittering across the branch cut.
pub fn fold_half(s: f64) -> f64 {
    let mut f = s - s.round();
    if f <= -0.5 + 1e-9 {
        f += 1.0;
    }
    f
}

/// Fold into (-pi, pi], biased like [`fold_half`].
pub fn fold_pi(phi: f64) -> f64 {
    2.0 * PI * fold_half(phi / (2.0 * PI))
}

/// Coarse fringe frequency from the dominant non-envelope peak of the
/// pattern's magnitude spectrum, in cycles per screen unit.
fn coarse_frequency(p: &Pattern) -> Option<f64> {
    let n = p.grid.n_points;
    let mut data: Vec<C64> = p.intensity.iter().map(|&v| C64::new(v, 0.0)).collect();
    fft_in_place(&mut data, false);
    let mags: Vec<f64> = data[..n / 2].iter().map(|c| c.norm()).collect();
    let floor = 1e-4 * mags[0].max(f64::MIN_POSITIVE);
    let mut best: Option<(usize, f64)> = None;
    for k in 2..n / 2 - 1 {
        if mags[k] > mags[k - 1] && mags[k] >= mags[k + 1] && mags[k] > floor {
            if best.map_or(true, |(_, m)| mags[k] > m) {
                best = Some((k, mags[k]));
            }
        }
    }
    best.map(|(k, _)| k as f64 / (n as f64 * p.grid.spacing()))
}

/// Hann-windowed demodulation of the pattern at frequency `f` on a
/// window of half-width `half` centered at `center`: returns (S0, S1)
/// with S0 = integral of I w and S1 = integral of I w e^{-i 2 pi f x}.
fn demodulate(p: &Pattern, f: f64, center: f64, half: f64) -> (f64, C64) {
    let dx = p.grid.spacing();
    let mut s0 = 0.0;
    let mut s1 = C64::new(0.0, 0.0);
    for (i, &v) in p.intensity.iter().enumerate() {
        let x = p.grid.value(i);
        let u = (x - center) / half;
        if u.abs() >= 1.0 {
            continue;
        }
        let w = 0.5 * (1.0 + (PI * u).cos());
        s0 += v * w;
        s1 += v * w * C64::from_polar(1.0, -2.0 * PI * f * x);
    }
    (s0 * dx, s1 * dx)
}

/// Golden-section refinement of the demodulation peak around `f0`.
///
/// The window is held at the coarse estimate's size; otherwise lower
/// candidate frequencies win spuriously by widening their own window.
fn refine_frequency(p: &Pattern, f0: f64, center: f64) -> f64 {
    let span = p.grid.span();
    let half = 3.0 / f0;
    let mut a = f0 - 1.0 / span;
    let mut b = f0 + 1.0 / span;
    let score = |f: f64| demodulate(p, f, center, half).1.norm();
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (score(c), score(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = score(d);
        }
    }
    0.5 * (a + b)
}

/// Measure visibility, period, and (against `reference`) fringe shift.
///
/// When no fringe frequency is detectable the report carries visibility
/// 0 with period and shift undefined.
pub fn fringe_report(p: &Pattern, reference: Option<&Pattern>) -> Result<FringeReport> {
    if let Some(r) = reference {
        if !r.grid.compatible(&p.grid) {
            return Err(Error::GridMismatch);
        }
    }
    // the reference (when present) pins the analysis frequency so the
    // phase comparison is meaningful
    let freq_source = reference.unwrap_or(p);
    let coarse = coarse_frequency(freq_source);
    let Some(f0) = coarse else {
        return Ok(FringeReport {
            visibility: 0.0,
            period: None,
            shift: None,
            window: (p.grid.x_min, p.grid.x_max),
        });
    };
    let f = refine_frequency(freq_source, f0, freq_source.centroid());
    let center = p.centroid();
    let half = 3.0 / f;
    let (s0, s1) = demodulate(p, f, center, half);
    let visibility = if s0 > 0.0 {
        (2.0 * s1.norm() / s0).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let shift = match reference {
        Some(r) if visibility >= 1e-3 => {
            let (_, s1_ref) = demodulate(r, f, r.centroid(), half);
            if s1_ref.norm() > 0.0 {
                Some(fold_half((s1_ref.arg() - s1.arg()) / (2.0 * PI)))
            } else {
                None
            }
        }
        _ => None,
    };
    Ok(FringeReport {
        visibility,
        period: Some(1.0 / f),
        shift,
        window: (center - 3.0 / f, center + 3.0 / f),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cosine_pattern(phase: f64, vis: f64) -> Pattern {
        let grid = Grid::new(-50.0, 50.0, 4096).unwrap();
        let period = 5.0;
        let intensity = grid
            .values()
            .map(|x| {
                let env = (-x * x / 800.0).exp();
                env * (1.0 + vis * (2.0 * PI * x / period + phase).cos())
            })
            .collect();
        Pattern::new(grid, intensity).unwrap()
    }

    #[test]
    fn half_period_shift_is_measured() {
        let a = cosine_pattern(0.0, 1.0);
        let b = cosine_pattern(PI, 1.0);
        let r = fringe_report(&b, Some(&a)).unwrap();
        assert!((r.visibility - 1.0).abs() < 0.01, "visibility {}", r.visibility);
        assert!((r.period.unwrap() - 5.0).abs() < 0.05, "period {:?}", r.period);
        assert!((r.shift.unwrap().abs() - 0.5).abs() < 0.005, "shift {:?}", r.shift);
    }

    #[test]
    fn quarter_period_shift_sign() {
        let a = cosine_pattern(0.0, 1.0);
        // I(x) = cos(2 pi x / T - pi/2) = ref(x - T/4): shifted +T/4
        let b = cosine_pattern(-PI / 2.0, 1.0);
        let r = fringe_report(&b, Some(&a)).unwrap();
        assert!((r.shift.unwrap() - 0.25).abs() < 0.005, "shift {:?}", r.shift);
    }

    #[test]
    fn washed_out_sum_has_no_visibility() {
        let a = cosine_pattern(0.0, 1.0);
        let b = cosine_pattern(PI, 1.0);
        let sum = a.add(&b).unwrap();
        let r = fringe_report(&sum, None).unwrap();
        assert!(r.visibility < 0.01, "visibility {}", r.visibility);
    }

    #[test]
    fn partial_visibility_recovered() {
        for vis in [0.25, 0.5, 0.75] {
            let p = cosine_pattern(0.3, vis);
            let r = fringe_report(&p, None).unwrap();
            assert!(
                (r.visibility - vis).abs() < 0.01,
                "measured {} expected {vis}",
                r.visibility
            );
        }
    }

    #[test]
    fn envelope_only_reports_zero() {
        let grid = Grid::new(-50.0, 50.0, 4096).unwrap();
        let intensity = grid.values().map(|x| (-x * x / 800.0).exp()).collect();
        let p = Pattern::new(grid, intensity).unwrap();
        let r = fringe_report(&p, None).unwrap();
        assert_eq!(r.visibility, 0.0);
        assert!(r.period.is_none() && r.shift.is_none());
    }

    #[test]
    fn fold_half_branch() {
        assert!((fold_half(0.5) - 0.5).abs() < 1e-12);
        assert!((fold_half(-0.5) - 0.5).abs() < 1e-12);
        assert!((fold_half(1.3) - 0.3).abs() < 1e-12);
        assert!((fold_half(-0.3) + 0.3).abs() < 1e-12);
        assert!((fold_half(2.0 / 3.0) + 1.0 / 3.0).abs() < 1e-12);
    }
}
