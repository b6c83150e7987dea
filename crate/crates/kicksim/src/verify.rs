//! Verification suites: each suite runs a battery of numbered checks at
//! desk scale and reports measured value, threshold, and pass/fail.

use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kicks::{
    biased_basis_counterexample, general_basis_kick_form, kick_representation, kick_spectrum,
    representation_fidelity, KickFormVerdict,
};
use crate::montecarlo::{compare_positions, sample, uniform};
use crate::patterns::{conditioned_pattern, fold_half, fold_pi, fringe_report, intensity, Pattern};
use crate::propagate::{
    entangled_far_field_threshold, evolve_entangled, to_far_field, Mode, PropagationSpec,
};
use crate::pspace::{
    make_momentum_state, position_kick_representation, position_kick_value, MomentumPeaks,
};
use crate::qstate::{
    entangle, entangle_with_detectors, make_slit_states, superpose, DetectorVector,
    EntangledState, Origin, Profile, SlitArray,
};
use crate::ubasis::{fourier_basis, general_two_slit_basis, Unitary};
use crate::wavefunction::WaveFunction;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Override the slit width ratio (default 1/20). Used as a negative
    /// control: 1/4 violates the narrowness precondition and the suites
    /// abort with the overlap guard.
    pub sigma_over_d: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            sigma_over_d: 1.0 / 20.0,
            seed: 0,
        }
    }
}

pub const SUITES: &[&str] = &["eraser", "equivalence", "spectrum", "pspace", "montecarlo"];

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<Vec<Verdict>> {
    let single = |v: Verdict| Ok(vec![v]);
    match name {
        "eraser" => single(eraser_suite(opts)?),
        "equivalence" => single(equivalence_suite(opts)?),
        "spectrum" => single(spectrum_suite()?),
        "pspace" => single(pspace_suite()?),
        "montecarlo" => single(montecarlo_suite(opts)?),
        "all" => Ok(vec![
            eraser_suite(opts)?,
            equivalence_suite(opts)?,
            spectrum_suite()?,
            pspace_suite()?,
            montecarlo_suite(opts)?,
        ]),
        other => Err(Error::InvalidConfig(format!("unknown suite \"{other}\""))),
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    /// Pass iff value <= threshold.
    fn at_most(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        });
    }

    /// Pass iff value >= threshold.
    fn at_least(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
        });
    }

    fn verdict(self, suite: &str) -> Verdict {
        let pass = self.0.iter().all(|c| c.pass);
        Verdict {
            suite: suite.to_string(),
            checks: self.0,
            pass,
        }
    }
}

fn slit_array(n: usize, sigma_over_d: f64, origin: Origin) -> Result<SlitArray> {
    SlitArray::new(n, 1.0, sigma_over_d, Profile::Gaussian, origin)
}

fn grid_for(slits: &SlitArray, n_points: usize) -> Result<Grid> {
    let g = slits.default_grid();
    Grid::new(g.x_min, g.x_max, n_points)
}

/// Slit states, which-way state, and equal-weight superposition.
fn prepare(
    slits: &SlitArray,
    n_points: usize,
) -> Result<(Vec<WaveFunction>, EntangledState, WaveFunction)> {
    let grid = grid_for(slits, n_points)?;
    let states = make_slit_states(slits, &grid)?;
    let ww = entangle(&states)?;
    let coeffs = vec![C64::new(1.0, 0.0); slits.n];
    let base = superpose(&states, &coeffs)?;
    Ok((states, ww, base))
}

fn far_field(state: &EntangledState) -> Result<EntangledState> {
    let t = 2.0 * entangled_far_field_threshold(state);
    evolve_entangled(state, &PropagationSpec {
        mode: Mode::Fraunhofer,
        t,
    })
}

fn visibility(p: &Pattern) -> Result<f64> {
    Ok(fringe_report(p, None)?.visibility)
}

/// Fourier-basis kick representation of the which-way state, with the
/// constant phases required by the slit origin.
fn kick_form_of(
    slits: &SlitArray,
    base: &WaveFunction,
) -> Result<EntangledState> {
    let spectrum = kick_spectrum(slits.n, slits.d, false)?;
    let c0 = slits.centers()[0];
    let phases: Vec<f64> = spectrum.kicks.iter().map(|k| -k.momentum * c0).collect();
    kick_representation(base, &spectrum, &phases)
}

/// Washout, partial which-way, and eraser recovery.
fn eraser_suite(opts: &VerifyOptions) -> Result<Verdict> {
    let mut checks = Checks::new();

    // washout for n = 2..5 and full fringes with no detector
    for n in 2..=5usize {
        let slits = slit_array(n, opts.sigma_over_d, Origin::AtZero)?;
        let (_, ww, base) = prepare(&slits, 4096)?;
        let far = far_field(&ww)?;
        let unc = intensity(&far)?;
        checks.at_most(format!("washout_n{n}_visibility"), visibility(&unc)?, 0.01);

        let free = to_far_field(&base, 2.0 * entangled_far_field_threshold(&ww))?;
        let free_pattern = Pattern::new(free.grid, free.amplitudes.iter().map(|a| a.norm_sqr()).collect())?;
        checks.at_least(
            format!("no_detector_n{n}_visibility"),
            visibility(&free_pattern)?,
            0.99,
        );
    }

    // partial which-way: visibility equals the detector overlap
    let slits = slit_array(2, opts.sigma_over_d, Origin::AtZero)?;
    let (states, _, _) = prepare(&slits, 4096)?;
    for overlap in [0.25, 0.5, 0.75] {
        let d1 = DetectorVector::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?;
        let d2 = DetectorVector::new(vec![
            C64::new(overlap, 0.0),
            C64::new((1.0 - overlap * overlap).sqrt(), 0.0),
        ])?;
        let partial = entangle_with_detectors(&states, &[d1, d2])?;
        let far = far_field(&partial)?;
        let vis = visibility(&intensity(&far)?)?;
        checks.at_most(
            format!("partial_overlap_{overlap}_visibility_error"),
            (vis - overlap).abs(),
            0.01,
        );
    }

    // eraser: d+ pattern is half the no-detector pattern, d- is shifted
    // by half a period
    let (_, ww, base) = prepare(&slits, 4096)?;
    let erased = ww.change_basis(fourier_basis(2)?.unitary())?;
    let far = far_field(&erased)?;
    let plus = conditioned_pattern(&far, 0)?;
    let minus = conditioned_pattern(&far, 1)?;
    let free = to_far_field(&base, 2.0 * entangled_far_field_threshold(&ww))?;
    let free_pattern = Pattern::new(free.grid, free.amplitudes.iter().map(|a| a.norm_sqr()).collect())?;
    let peak = free_pattern.intensity.iter().cloned().fold(0.0, f64::max);
    let mut rel_err: f64 = 0.0;
    for (a, b) in plus.intensity.iter().zip(&free_pattern.intensity) {
        if *b >= 0.01 * peak {
            rel_err = rel_err.max((a - 0.5 * b).abs() / (0.5 * b));
        }
    }
    checks.at_most("eraser_plus_pattern_rel_error", rel_err, 0.01);
    let shift = fringe_report(&minus, Some(&plus))?
        .shift
        .ok_or(Error::EmptyState)?;
    checks.at_most("eraser_minus_shift_error", (shift.abs() - 0.5).abs(), 0.005);

    Ok(checks.verdict("eraser"))
}

/// Kick equivalence, fringe-shift law, general unbiased bases, hygiene.
fn equivalence_suite(opts: &VerifyOptions) -> Result<Verdict> {
    let mut checks = Checks::new();

    // global fidelity between the Fourier-basis state and the kick form
    for n in 2..=5usize {
        let slits = slit_array(n, opts.sigma_over_d, Origin::AtZero)?;
        let (_, ww, base) = prepare(&slits, 4096)?;
        let fourier = ww.change_basis(fourier_basis(n)?.unitary())?;
        let kicked = kick_form_of(&slits, &base)?;
        let fid = representation_fidelity(&fourier, &kicked)?;
        checks.at_least(format!("kick_equivalence_n{n}_fidelity"), fid.global, 0.99);
    }

    // narrow-slit limit at sigma = d/100
    {
        let slits = slit_array(2, 0.01, Origin::AtZero)?;
        let (_, ww, base) = prepare(&slits, 8192)?;
        let fourier = ww.change_basis(fourier_basis(2)?.unitary())?;
        let kicked = kick_form_of(&slits, &base)?;
        let fid = representation_fidelity(&fourier, &kicked)?;
        checks.at_most("kick_equivalence_sigma_d100_infidelity", 1.0 - fid.global, 1e-6);
    }

    // infidelity must fall monotonically as the slits narrow
    {
        let mut infids = Vec::new();
        for sigma in [0.1, 0.05, 0.025, 0.0125] {
            let slits = slit_array(2, sigma, Origin::AtZero)?;
            let (_, ww, base) = prepare(&slits, 8192)?;
            let fourier = ww.change_basis(fourier_basis(2)?.unitary())?;
            let kicked = kick_form_of(&slits, &base)?;
            infids.push(1.0 - representation_fidelity(&fourier, &kicked)?.global);
        }
        let worst_step = infids
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        checks.at_most("kick_infidelity_sweep_monotone_step", worst_step, 0.0);
    }

    // fringe-shift law: Fourier outcome j shifts the pattern by j/n
    for n in [2usize, 3, 5] {
        let slits = slit_array(n, opts.sigma_over_d, Origin::AtZero)?;
        let (_, ww, _) = prepare(&slits, 4096)?;
        let fourier = ww.change_basis(fourier_basis(n)?.unitary())?;
        let far = far_field(&fourier)?;
        let conditioned: Vec<Pattern> = (0..n)
            .map(|j| conditioned_pattern(&far, j))
            .collect::<Result<_>>()?;
        let mut worst: f64 = 0.0;
        for (j, c) in conditioned.iter().enumerate() {
            let shift = fringe_report(c, Some(&conditioned[0]))?
                .shift
                .ok_or(Error::EmptyState)?;
            // the law fixes the magnitude of the shift ladder; its sign
            // depends on the screen-axis orientation
            let expected = fold_half(j as f64 / n as f64).abs();
            worst = worst.max((shift.abs() - expected).abs());
        }
        checks.at_most(format!("fringe_shift_law_n{n}_error"), worst, 0.01);
        let mut sum = conditioned[0].clone();
        for c in &conditioned[1..] {
            sum = sum.add(c)?;
        }
        checks.at_most(format!("shifted_sum_n{n}_visibility"), visibility(&sum)?, 0.01);
    }

    // general two-slit unbiased bases, 25 seeded draws per origin
    for (origin, extra, label) in [
        (Origin::AtZero, 0.0, "at_zero"),
        (Origin::Centered, PI / 2.0, "centered"),
    ] {
        let slits = slit_array(2, opts.sigma_over_d, origin)?;
        let grid = grid_for(&slits, 4096)?;
        let states = make_slit_states(&slits, &grid)?;
        let ww = entangle(&states)?;
        let mut worst_kick: f64 = 0.0;
        let mut worst_phase: f64 = 0.0;
        for i in 0..25u64 {
            let th = |k: u64| (uniform(opts.seed ^ 0xb5, 3 * i + k) - 0.5) * 2.0 * PI;
            let (t1, t2, t3) = (th(0), th(1), th(2));
            let basis = general_two_slit_basis(t1, t2, t3);
            let rec = general_basis_kick_form(&ww, &basis, &slits)?;
            worst_kick = worst_kick.max((rec.kick_magnitude - PI / slits.d).abs() / (PI / slits.d));
            worst_phase = worst_phase.max(fold_pi(rec.constant_phase - (t2 - t1) - extra).abs());
        }
        checks.at_most(format!("general_basis_{label}_kick_rel_error"), worst_kick, 0.01);
        checks.at_most(format!("general_basis_{label}_phase_error"), worst_phase, 0.01);
    }

    // biased bases admit no kick reading
    {
        let slits = slit_array(2, opts.sigma_over_d, Origin::AtZero)?;
        let (_, ww, _) = prepare(&slits, 4096)?;
        for (u, label) in [
            (Unitary::identity(2), "identity"),
            (Unitary::rotation2(PI / 6.0), "rotation_pi6"),
        ] {
            let rec = biased_basis_counterexample(&ww, &u)?;
            let disqualified = rec.verdict != KickFormVerdict::Holds;
            checks.at_least(
                format!("biased_basis_{label}_disqualified"),
                disqualified as u8 as f64,
                1.0,
            );
        }
    }

    // numerical hygiene
    {
        let slits = slit_array(2, opts.sigma_over_d, Origin::AtZero)?;
        let (_, ww, _) = prepare(&slits, 4096)?;
        let evolved = evolve_entangled(&ww, &PropagationSpec {
            mode: Mode::FresnelExact,
            t: 0.5 * slits.d * slits.sigma,
        })?;
        checks.at_most(
            "evolution_norm_drift",
            (evolved.total_norm2() - 1.0).abs(),
            1e-10,
        );

        let u = fourier_basis(2)?;
        let back = ww.change_basis(u.unitary())?.change_basis(&u.unitary().adjoint())?;
        let mut dev: f64 = 0.0;
        for (a, b) in ww.components.iter().zip(&back.components) {
            for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
                dev = dev.max((x - y).norm());
            }
        }
        checks.at_most("basis_round_trip_deviation", dev, 1e-10);

        let far = far_field(&ww.change_basis(u.unitary())?)?;
        let unc = intensity(&far)?;
        let sum = conditioned_pattern(&far, 0)?.add(&conditioned_pattern(&far, 1)?)?;
        let mut dev: f64 = 0.0;
        for (a, b) in unc.intensity.iter().zip(&sum.intensity) {
            dev = dev.max((a - b).abs());
        }
        checks.at_most("eraser_decomposition_deviation", dev, 1e-10);
    }

    Ok(checks.verdict("equivalence"))
}

/// Exact rational kick tables for n = 2..8.
fn spectrum_suite() -> Result<Verdict> {
    let mut checks = Checks::new();
    for n in 2..=8usize {
        let unfolded = kick_spectrum(n, 1.0, false)?;
        let mut mismatches = 0usize;
        for (j, k) in unfolded.kicks.iter().enumerate() {
            let g = gcd(j as i64, n as i64);
            if k.ratio != (j as i64 / g, n as i64 / g) {
                mismatches += 1;
            }
        }
        checks.at_most(format!("spectrum_n{n}_unfolded_mismatches"), mismatches as f64, 0.0);

        let folded = kick_spectrum(n, 1.0, true)?;
        let expected_max = if n % 2 == 0 {
            (1, 2)
        } else {
            ((n as i64 - 1) / 2, n as i64)
        };
        checks.at_most(
            format!("spectrum_n{n}_folded_max_exact"),
            (folded.max_ratio() != expected_max) as u8 as f64,
            0.0,
        );
        checks.at_most(
            format!("spectrum_n{n}_min_nonzero_exact"),
            (folded.min_nonzero_ratio() != (1, n as i64)) as u8 as f64,
            0.0,
        );
    }
    Ok(checks.verdict("spectrum"))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs().max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Momentum-space dual.
fn pspace_suite() -> Result<Verdict> {
    let mut checks = Checks::new();
    let peaks = MomentumPeaks::new(2.0, 6.0, (6.0 - 2.0) / 20.0)?;
    let x0 = position_kick_value(&peaks)?;
    checks.at_most(
        "position_kick_value_exact",
        (x0 - PI / (peaks.p2 - peaks.p1)).abs(),
        0.0,
    );

    let grid = peaks.default_grid();
    let state = make_momentum_state(&peaks, &grid)?;
    let coeffs = vec![C64::new(1.0, 0.0); 2];
    let base = superpose(&state.components, &coeffs)?;
    let fourier = state.change_basis(fourier_basis(2)?.unitary())?;
    let kicked = position_kick_representation(&base, &peaks)?;
    let fid = representation_fidelity(&fourier, &kicked)?;
    checks.at_least("position_kick_fidelity", fid.global, 0.99);

    // duality: the scaled position-space two-slit problem reproduces the
    // momentum-space fidelity
    let slits = slit_array(2, 1.0 / 20.0, Origin::AtZero)?;
    let (_, ww, pos_base) = prepare(&slits, 4096)?;
    let pos_fourier = ww.change_basis(fourier_basis(2)?.unitary())?;
    let pos_kicked = kick_form_of(&slits, &pos_base)?;
    let fid_pos = representation_fidelity(&pos_fourier, &pos_kicked)?.global;

    let s = 2.0 * PI / (slits.d * slits.d);
    let dual_peaks = MomentumPeaks::new(0.0, s * slits.d, s * slits.sigma)?;
    let g = grid_for(&slits, 4096)?;
    let dual_grid = Grid::new(s * g.x_min, s * g.x_max, g.n_points)?;
    let dual_state = make_momentum_state(&dual_peaks, &dual_grid)?;
    let dual_base = superpose(&dual_state.components, &coeffs)?;
    let dual_fourier = dual_state.change_basis(fourier_basis(2)?.unitary())?;
    let dual_kicked = position_kick_representation(&dual_base, &dual_peaks)?;
    let fid_dual = representation_fidelity(&dual_fourier, &dual_kicked)?.global;
    checks.at_most("duality_fidelity_deviation", (fid_pos - fid_dual).abs(), 1e-9);

    Ok(checks.verdict("pspace"))
}

/// Monte Carlo statistics and determinism.
fn montecarlo_suite(opts: &VerifyOptions) -> Result<Verdict> {
    let mut checks = Checks::new();
    let n_samples = 100_000usize;

    for n in [2usize, 3] {
        let slits = slit_array(n, opts.sigma_over_d, Origin::AtZero)?;
        let (_, ww, _) = prepare(&slits, 4096)?;
        let fourier = ww.change_basis(fourier_basis(n)?.unitary())?;
        let far = far_field(&fourier)?;
        let run = sample(&far, n_samples, opts.seed.wrapping_add(n as u64))?;
        let p = 1.0 / n as f64;
        let three_sigma = 3.0 * (p * (1.0 - p) / n_samples as f64).sqrt();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let freq = run.records.iter().filter(|r| r.outcome == j).count() as f64
                / n_samples as f64;
            worst = worst.max((freq - p).abs());
        }
        checks.at_most(format!("outcome_frequency_n{n}_deviation"), worst, three_sigma);
    }

    // unconditioned screen statistics are basis-independent
    {
        let slits = slit_array(2, opts.sigma_over_d, Origin::AtZero)?;
        let (_, ww, _) = prepare(&slits, 4096)?;
        let far_ww = far_field(&ww)?;
        let far_fourier = far_field(&ww.change_basis(fourier_basis(2)?.unitary())?)?;
        let a = sample(&far_ww, n_samples, opts.seed.wrapping_add(11))?;
        let b = sample(&far_fourier, n_samples, opts.seed.wrapping_add(12))?;
        let cmp = compare_positions(&a, &b, 1e-3)?;
        checks.at_most("cross_basis_ks_statistic", cmp.ks_statistic, cmp.ks_critical);

        let rerun = sample(&far_ww, n_samples, opts.seed.wrapping_add(11))?;
        checks.at_least(
            "equal_seed_reruns_identical",
            (rerun.records == a.records) as u8 as f64,
            1.0,
        );
    }

    Ok(checks.verdict("montecarlo"))
}
