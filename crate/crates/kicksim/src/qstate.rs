//! Slit geometry, slit wavefunctions, superpositions, and the
//! particle-detector entangled state.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ubasis::Unitary;
use crate::wavefunction::{Space, WaveFunction};

/// Pairwise slit-state overlaps at or above this magnitude break the
/// near-orthogonality assumption everything downstream relies on.
pub const OVERLAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Gaussian,
    Tophat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// Slits at 0, d, 2d, ..., (n-1)d.
    AtZero,
    /// Slits centered on 0: two slits at +-d/2, three at -d, 0, d, and so on.
    Centered,
}

/// Geometry of n equally spaced apertures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitArray {
    pub n: usize,
    pub d: f64,
    pub sigma: f64,
    pub profile: Profile,
    pub origin: Origin,
}

impl SlitArray {
    pub fn new(n: usize, d: f64, sigma: f64, profile: Profile, origin: Origin) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension { n });
        }
        if !(d > 0.0) {
            return Err(Error::InvalidConfig(format!("slit spacing d must be > 0, got {d}")));
        }
        if !(sigma > 0.0 && sigma <= d / 4.0) {
            return Err(Error::InvalidConfig(format!(
                "slit width sigma must satisfy 0 < sigma <= d/4, got sigma={sigma}, d={d}"
            )));
        }
        Ok(SlitArray {
            n,
            d,
            sigma,
            profile,
            origin,
        })
    }

    pub fn centers(&self) -> Vec<f64> {
        let offset = match self.origin {
            Origin::AtZero => 0.0,
            Origin::Centered => -0.5 * (self.n - 1) as f64 * self.d,
        };
        (0..self.n).map(|k| offset + k as f64 * self.d).collect()
    }

    /// Default grid: 4096 points spanning all slit centers with generous
    /// margin, fine enough to resolve sigma = d/20.
    pub fn default_grid(&self) -> Grid {
        let centers = self.centers();
        let lo = centers[0] - 4.0 * self.d;
        let hi = centers[self.n - 1] + 4.0 * self.d;
        Grid::new(lo, hi, 4096).expect("default grid construction")
    }
}

fn slit_amplitude(profile: Profile, sigma: f64, u: f64) -> f64 {
    match profile {
        Profile::Gaussian => (-u * u / (2.0 * sigma * sigma)).exp(),
        // tophat of half-width sigma
        Profile::Tophat => {
            if u.abs() <= sigma {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Unit-normalized states centered on the slit positions.
pub fn make_slit_states(slits: &SlitArray, grid: &Grid) -> Result<Vec<WaveFunction>> {
    let dx = grid.spacing();
    if dx > slits.sigma / 8.0 {
        return Err(Error::GridTooCoarse {
            spacing: dx,
            limit: slits.sigma / 8.0,
        });
    }
    let centers = slits.centers();
    let margin = 8.0 * slits.sigma;
    if grid.x_min > centers[0] - margin || grid.x_max < centers[slits.n - 1] + margin {
        return Err(Error::GridTooSmall);
    }
    let states: Vec<WaveFunction> = centers
        .iter()
        .map(|&c| {
            let amps = grid
                .values()
                .map(|x| C64::new(slit_amplitude(slits.profile, slits.sigma, x - c), 0.0))
                .collect();
            WaveFunction::new(*grid, amps, Space::Position).map(|w| w.normalized())
        })
        .collect::<Result<_>>()?;
    check_near_orthogonal(&states)?;
    Ok(states)
}

fn check_near_orthogonal(states: &[WaveFunction]) -> Result<()> {
    for j in 0..states.len() {
        for k in j + 1..states.len() {
            let ov = states[j].inner(&states[k])?.norm();
            if ov >= OVERLAP_TOL {
                return Err(Error::OverlapTooLarge { overlap: ov });
            }
        }
    }
    Ok(())
}

/// Normalized superposition sum_k c_k psi_k.
pub fn superpose(states: &[WaveFunction], coeffs: &[C64]) -> Result<WaveFunction> {
    if states.is_empty() {
        return Err(Error::EmptyState);
    }
    if states.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: states.len(),
            got: coeffs.len(),
        });
    }
    let grid = states[0].grid;
    let mut out = WaveFunction::zeros(grid, states[0].space);
    for (s, &c) in states.iter().zip(coeffs) {
        if !s.grid.compatible(&grid) {
            return Err(Error::GridMismatch);
        }
        for (o, a) in out.amplitudes.iter_mut().zip(&s.amplitudes) {
            *o += c * a;
        }
    }
    Ok(out.normalized())
}

/// A complex unit vector of detector coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorVector {
    pub coeffs: Vec<C64>,
}

impl DetectorVector {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        let n2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (n2.sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "detector vector norm {} is not 1 within 1e-12",
                n2.sqrt()
            )));
        }
        Ok(DetectorVector { coeffs })
    }

    pub fn normalized(coeffs: Vec<C64>) -> Result<Self> {
        let n2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if n2 == 0.0 {
            return Err(Error::EmptyState);
        }
        let n = n2.sqrt();
        DetectorVector::new(coeffs.into_iter().map(|c| c / n).collect())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// The particle-detector state: one particle wavefunction per vector of
/// the detector basis currently in force.
#[derive(Debug, Clone, PartialEq)]
pub struct EntangledState {
    pub components: Vec<WaveFunction>,
    pub basis_tag: String,
}

pub const WHICH_WAY_TAG: &str = "which-way";

impl EntangledState {
    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid
    }

    /// sum_k ||component_k||^2; 1 for a normalized state.
    pub fn total_norm2(&self) -> f64 {
        self.components.iter().map(|c| c.norm2()).sum()
    }

    /// Probability of detector outcome j.
    pub fn outcome_probability(&self, j: usize) -> Result<f64> {
        self.check_index(j)?;
        Ok(self.components[j].norm2())
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: j,
                n: self.n(),
            });
        }
        Ok(())
    }

    /// Post-select on outcome j: the normalized particle state and the
    /// probability of that outcome.
    pub fn condition(&self, j: usize) -> Result<(WaveFunction, f64)> {
        self.check_index(j)?;
        let p = self.components[j].norm2();
        Ok((self.components[j].normalized(), p))
    }

    /// Re-express the detector in a new basis.
    ///
    /// `u` holds the old which-way vectors column-wise in the new basis
    /// (U_jk = <new_j|d_k>), so the new component j is sum_k U_jk c_k,
    /// which is exactly the conditional state <new_j|Psi>.
    pub fn change_basis(&self, u: &Unitary) -> Result<EntangledState> {
        u.check_unitary(1e-10)?;
        if u.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: u.n(),
            });
        }
        let grid = self.grid();
        for c in &self.components {
            if !c.grid.compatible(&grid) {
                return Err(Error::GridMismatch);
            }
        }
        let space = self.components[0].space;
        let mut components = Vec::with_capacity(self.n());
        for j in 0..self.n() {
            let mut out = WaveFunction::zeros(grid, space);
            for k in 0..self.n() {
                let ujk = u.entry(j, k);
                for (o, a) in out.amplitudes.iter_mut().zip(&self.components[k].amplitudes) {
                    *o += ujk * a;
                }
            }
            components.push(out);
        }
        Ok(EntangledState {
            components,
            basis_tag: u.tag().to_string(),
        })
    }
}

/// Eq.-style which-way entanglement: component_k = psi_k / sqrt(n).
pub fn entangle(states: &[WaveFunction]) -> Result<EntangledState> {
    let n = states.len();
    if n < 2 {
        return Err(Error::InvalidDimension { n });
    }
    check_near_orthogonal(states)?;
    let root_n_inv = 1.0 / (n as f64).sqrt();
    Ok(EntangledState {
        components: states
            .iter()
            .map(|s| s.scaled(C64::new(root_n_inv, 0.0)))
            .collect(),
        basis_tag: WHICH_WAY_TAG.to_string(),
    })
}

/// Entangle path states with arbitrary (possibly non-orthogonal) detector
/// states, each expressed in an m-dimensional orthonormal frame.
///
/// The resulting state has m components: component_i = (1/sqrt(n))
/// sum_k (d_k)_i psi_k. With <d_1|d_2> = c this realizes a partial
/// which-way detector.
pub fn entangle_with_detectors(
    states: &[WaveFunction],
    detectors: &[DetectorVector],
) -> Result<EntangledState> {
    let n = states.len();
    if n < 2 {
        return Err(Error::InvalidDimension { n });
    }
    if detectors.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: detectors.len(),
        });
    }
    let m = detectors[0].len();
    if detectors.iter().any(|d| d.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: detectors.iter().map(|d| d.len()).find(|&l| l != m).unwrap(),
        });
    }
    check_near_orthogonal(states)?;
    let grid = states[0].grid;
    let space = states[0].space;
    let root_n_inv = 1.0 / (n as f64).sqrt();
    let mut components = Vec::with_capacity(m);
    for i in 0..m {
        let mut out = WaveFunction::zeros(grid, space);
        for (k, s) in states.iter().enumerate() {
            if !s.grid.compatible(&grid) {
                return Err(Error::GridMismatch);
            }
            let c = detectors[k].coeffs[i] * root_n_inv;
            for (o, a) in out.amplitudes.iter_mut().zip(&s.amplitudes) {
                *o += c * a;
            }
        }
        components.push(out);
    }
    Ok(EntangledState {
        components,
        basis_tag: "embedded-detector".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ubasis::fourier_basis;

    fn two_slit() -> (SlitArray, Grid) {
        let slits = SlitArray::new(2, 1.0, 0.05, Profile::Gaussian, Origin::AtZero).unwrap();
        let grid = slits.default_grid();
        (slits, grid)
    }

    #[test]
    fn slit_states_are_orthonormal() {
        let (slits, grid) = two_slit();
        let states = make_slit_states(&slits, &grid).unwrap();
        assert_eq!(states.len(), 2);
        for s in &states {
            assert!((s.norm2() - 1.0).abs() < 1e-10);
        }
        let ov = states[0].inner(&states[1]).unwrap().norm();
        assert!(ov < 1e-8);
        // centers land where the geometry says
        assert!((states[0].centroid() - 0.0).abs() < 1e-9);
        assert!((states[1].centroid() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn centered_three_slit_centers() {
        let slits = SlitArray::new(3, 1.0, 0.05, Profile::Gaussian, Origin::Centered).unwrap();
        assert_eq!(slits.centers(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn tophat_at_quarter_spacing_has_zero_overlap() {
        let slits = SlitArray::new(2, 1.0, 0.25, Profile::Tophat, Origin::AtZero).unwrap();
        let grid = slits.default_grid();
        let states = make_slit_states(&slits, &grid).unwrap();
        let ov = states[0].inner(&states[1]).unwrap().norm();
        assert_eq!(ov, 0.0);
    }

    #[test]
    fn gaussian_at_quarter_spacing_is_rejected() {
        let slits = SlitArray::new(2, 1.0, 0.25, Profile::Gaussian, Origin::AtZero).unwrap();
        let grid = Grid::new(-4.0, 5.0, 8192).unwrap();
        match make_slit_states(&slits, &grid) {
            Err(Error::OverlapTooLarge { .. }) => {}
            other => panic!("expected OverlapTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let (slits, _) = two_slit();
        let grid = Grid::new(-4.0, 5.0, 256).unwrap();
        match make_slit_states(&slits, &grid) {
            Err(Error::GridTooCoarse { .. }) => {}
            other => panic!("expected GridTooCoarse, got {other:?}"),
        }
    }

    #[test]
    fn superpose_identity_and_symmetric() {
        let (slits, grid) = two_slit();
        let states = make_slit_states(&slits, &grid).unwrap();
        let one = superpose(&states[..1], &[C64::new(1.0, 0.0)]).unwrap();
        assert!((one.inner(&states[0]).unwrap().norm() - 1.0).abs() < 1e-10);

        let c = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let plus = superpose(&states, &[c, c]).unwrap();
        assert!((plus.norm2() - 1.0).abs() < 1e-10);
        let minus = superpose(&states, &[c, -c]).unwrap();
        assert!(plus.inner(&minus).unwrap().norm() < 1e-8);
    }

    #[test]
    fn entangle_splits_probability_evenly() {
        let (slits, grid) = two_slit();
        let states = make_slit_states(&slits, &grid).unwrap();
        let ent = entangle(&states).unwrap();
        assert_eq!(ent.basis_tag, WHICH_WAY_TAG);
        assert!((ent.total_norm2() - 1.0).abs() < 1e-10);
        for k in 0..2 {
            assert!((ent.outcome_probability(k).unwrap() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn entangle_rejects_single_state() {
        let (slits, grid) = two_slit();
        let states = make_slit_states(&slits, &grid).unwrap();
        assert!(matches!(
            entangle(&states[..1]),
            Err(Error::InvalidDimension { n: 1 })
        ));
    }

    #[test]
    fn condition_in_plus_minus_basis() {
        let (slits, grid) = two_slit();
        let states = make_slit_states(&slits, &grid).unwrap();
        let ent = entangle(&states).unwrap();
        let pm = ent.change_basis(fourier_basis(2).unwrap().unitary()).unwrap();
        let (plus, p_plus) = pm.condition(0).unwrap();
        assert!((p_plus - 0.5).abs() < 1e-10);
        let c = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let expect = superpose(&states, &[c, c]).unwrap();
        assert!((plus.inner(&expect).unwrap().norm() - 1.0).abs() < 1e-10);

        let (_, p_minus) = pm.condition(1).unwrap();
        assert!((p_plus + p_minus - 1.0).abs() < 1e-10);
        assert!(pm.condition(2).is_err());
    }

    #[test]
    fn basis_round_trip() {
        let (slits, grid) = two_slit();
        let states = make_slit_states(&slits, &grid).unwrap();
        let ent = entangle(&states).unwrap();
        let u = fourier_basis(2).unwrap();
        let there = ent.change_basis(u.unitary()).unwrap();
        let back = there.change_basis(&u.unitary().adjoint()).unwrap();
        for (a, b) in ent.components.iter().zip(&back.components) {
            for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }
}
