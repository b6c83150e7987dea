//! Monte Carlo detection records: draw (outcome, position) samples from
//! an entangled state and compare sample runs statistically.
//!
//! Sampling is counter-based: sample i of a run is a pure function of
//! (seed, i), so results are independent of thread count and identical
//! across runs with the same seed.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::qstate::EntangledState;

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Uniform in [0, 1) from counter `ctr` of the stream labelled `seed`.
pub(crate) fn uniform(seed: u64, ctr: u64) -> f64 {
    let z = mix64(seed.wrapping_add(GOLDEN).wrapping_mul(GOLDEN) ^ mix64(ctr.wrapping_mul(GOLDEN)));
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One detection event: which detector outcome fired and where the
/// particle landed on the screen axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Record {
    pub outcome: usize,
    pub x: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRun {
    pub basis_tag: String,
    pub seed: u64,
    pub n_samples: usize,
    #[serde(skip)]
    pub grid: Grid,
    pub records: Vec<Record>,
}

impl SampleRun {
    /// Counts per (outcome, grid cell), outcome-major.
    pub fn histogram(&self, n_outcomes: usize) -> Vec<u64> {
        let n_cells = self.grid.n_points;
        let mut h = vec![0u64; n_outcomes * n_cells];
        let dx = self.grid.spacing();
        for r in &self.records {
            let cell = (((r.x - self.grid.x_min) / dx).floor() as usize).min(n_cells - 1);
            h[r.outcome * n_cells + cell] += 1;
        }
        h
    }

    /// Counts per grid cell, ignoring outcomes.
    pub fn position_histogram(&self) -> Vec<u64> {
        let n_cells = self.grid.n_points;
        let mut h = vec![0u64; n_cells];
        let dx = self.grid.spacing();
        for r in &self.records {
            let cell = (((r.x - self.grid.x_min) / dx).floor() as usize).min(n_cells - 1);
            h[cell] += 1;
        }
        h
    }
}

/// Per-component cumulative distributions for inverse-CDF sampling.
struct Sampler {
    /// Cumulative outcome probabilities, last entry 1.
    outcome_cdf: Vec<f64>,
    /// Per outcome, cumulative cell probabilities, last entry 1.
    cell_cdfs: Vec<Vec<f64>>,
    grid: Grid,
}

impl Sampler {
    fn new(state: &EntangledState) -> Result<Self> {
        let total = state.total_norm2();
        if !(total > 0.0) {
            return Err(Error::EmptyState);
        }
        let grid = state.grid();
        let mut outcome_cdf = Vec::with_capacity(state.n());
        let mut cell_cdfs = Vec::with_capacity(state.n());
        let mut acc = 0.0;
        for c in &state.components {
            let n2 = c.norm2();
            acc += n2 / total;
            outcome_cdf.push(acc);
            let mut cdf = Vec::with_capacity(grid.n_points);
            let mut s = 0.0;
            for a in &c.amplitudes {
                s += a.norm_sqr();
                cdf.push(s);
            }
            if s > 0.0 {
                for v in &mut cdf {
                    *v /= s;
                }
            }
            cell_cdfs.push(cdf);
        }
        *outcome_cdf.last_mut().unwrap() = 1.0;
        Ok(Sampler {
            outcome_cdf,
            cell_cdfs,
            grid,
        })
    }

    fn draw(&self, seed: u64, i: u64) -> Record {
        let u1 = uniform(seed, 2 * i);
        let u2 = uniform(seed, 2 * i + 1);
        let outcome = self
            .outcome_cdf
            .partition_point(|&c| c <= u1)
            .min(self.outcome_cdf.len() - 1);
        let cdf = &self.cell_cdfs[outcome];
        let cell = cdf.partition_point(|&c| c <= u2).min(cdf.len() - 1);
        // uniform within the cell: the density is piecewise constant
        let lo = if cell == 0 { 0.0 } else { cdf[cell - 1] };
        let frac = if cdf[cell] > lo {
            (u2 - lo) / (cdf[cell] - lo)
        } else {
            0.5
        };
        let dx = self.grid.spacing();
        let x = self.grid.value(cell) - 0.5 * dx + frac * dx;
        Record { outcome, x }
    }
}

/// Draw `n_samples` (outcome, position) records from the state's joint
/// distribution, in parallel, reproducibly for a given seed.
pub fn sample(state: &EntangledState, n_samples: usize, seed: u64) -> Result<SampleRun> {
    let sampler = Sampler::new(state)?;
    let records: Vec<Record> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| sampler.draw(seed, i))
        .collect();
    Ok(SampleRun {
        basis_tag: state.basis_tag.clone(),
        seed,
        n_samples,
        grid: sampler.grid,
        records,
    })
}

/// Two-sample comparison verdicts at significance level `alpha`.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRecord {
    pub alpha: f64,
    /// Chi-squared over merged (outcome, cell) bins.
    pub chi2: f64,
    pub chi2_dof: usize,
    pub chi2_p_value: f64,
    pub chi2_pass: bool,
    /// Two-sample Kolmogorov-Smirnov on the pooled position samples.
    pub ks_statistic: f64,
    pub ks_critical: f64,
    pub ks_pass: bool,
    pub pass: bool,
}

/// Compare two sample runs drawn in the same basis: chi-squared on joint
/// (outcome, cell) histograms with bins merged until every pooled bin
/// expects at least 5 counts, plus a two-sample KS test on the positions.
pub fn compare_runs(a: &SampleRun, b: &SampleRun, alpha: f64) -> Result<ComparisonRecord> {
    let n_outcomes = a
        .records
        .iter()
        .chain(&b.records)
        .map(|r| r.outcome)
        .max()
        .unwrap_or(0)
        + 1;
    compare_histograms(a, b, alpha, n_outcomes)
}

/// Compare only the screen positions, ignoring outcome labels: the right
/// test between runs recorded in *different* detector bases, whose joint
/// statistics legitimately differ while the marginal must not.
pub fn compare_positions(a: &SampleRun, b: &SampleRun, alpha: f64) -> Result<ComparisonRecord> {
    compare_histograms(a, b, alpha, 1)
}

fn compare_histograms(
    a: &SampleRun,
    b: &SampleRun,
    alpha: f64,
    n_outcomes: usize,
) -> Result<ComparisonRecord> {
    if !a.grid.compatible(&b.grid) {
        return Err(Error::IncompatibleGrids);
    }
    if a.records.is_empty() || b.records.is_empty() {
        return Err(Error::EmptyState);
    }
    let (ha, hb) = if n_outcomes == 1 {
        (a.position_histogram(), b.position_histogram())
    } else {
        (a.histogram(n_outcomes), b.histogram(n_outcomes))
    };
    let (na, nb) = (a.records.len() as f64, b.records.len() as f64);

    // merge adjacent bins until the pooled count reaches 5 * (na + nb) /
    // min(na, nb), which keeps each run's expected count at least 5
    let pooled_min = 5.0 * (na + nb) / na.min(nb);
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&ca, &cb) in ha.iter().zip(&hb) {
        acc.0 += ca as f64;
        acc.1 += cb as f64;
        if acc.0 + acc.1 >= pooled_min {
            merged.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => merged.push(acc),
        }
    }

    let (mut chi2, mut dof) = (0.0, 0usize);
    let (ra, rb) = ((nb / na).sqrt(), (na / nb).sqrt());
    for &(ca, cb) in &merged {
        let denom = ca + cb;
        if denom > 0.0 {
            chi2 += (ra * ca - rb * cb).powi(2) / denom;
            dof += 1;
        }
    }
    dof = dof.saturating_sub(1).max(1);
    let chi2_p_value = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(chi2);
    let chi2_pass = chi2_p_value >= alpha;

    let (ks_statistic, ks_critical) = ks_two_sample(a, b, alpha);
    let ks_pass = ks_statistic <= ks_critical;

    Ok(ComparisonRecord {
        alpha,
        chi2,
        chi2_dof: dof,
        chi2_p_value,
        chi2_pass,
        ks_statistic,
        ks_critical,
        ks_pass,
        pass: chi2_pass && ks_pass,
    })
}

fn ks_two_sample(a: &SampleRun, b: &SampleRun, alpha: f64) -> (f64, f64) {
    let mut xa: Vec<f64> = a.records.iter().map(|r| r.x).collect();
    let mut xb: Vec<f64> = b.records.iter().map(|r| r.x).collect();
    xa.sort_by(|p, q| p.total_cmp(q));
    xb.sort_by(|p, q| p.total_cmp(q));
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        if xa[i] <= xb[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let c = ((2.0 / alpha).ln() / 2.0).sqrt();
    let critical = c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt();
    (d, critical)
}
