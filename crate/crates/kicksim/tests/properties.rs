//! Randomized invariants over the library's public surface.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use kicksim::kicks::kick_spectrum;
use kicksim::montecarlo::sample;
use kicksim::patterns::{fold_half, fold_pi};
use kicksim::propagate::conjugate_transform;
use kicksim::qstate::{entangle, make_slit_states};
use kicksim::ubasis::{fourier_basis, general_two_slit_basis, is_unbiased};
use kicksim::{Grid, Origin, Profile, SlitArray, Space, WaveFunction};

fn gaussian(grid: Grid, center: f64, sigma: f64, k: f64) -> WaveFunction {
    let amps = grid
        .values()
        .map(|x| {
            let u = (x - center) / sigma;
            C64::from_polar((-0.5 * u * u).exp(), k * x)
        })
        .collect();
    WaveFunction::new(grid, amps, Space::Position)
        .unwrap()
        .normalized()
}

proptest! {
    #[test]
    fn general_two_slit_basis_is_unbiased_and_unitary(
        t1 in -3.1f64..3.1,
        t2 in -3.1f64..3.1,
        t3 in -3.1f64..3.1,
    ) {
        let u = general_two_slit_basis(t1, t2, t3);
        prop_assert!(u.unitary().unitarity_deviation() < 1e-12);
        let (ok, dev) = is_unbiased(u.unitary()).unwrap();
        prop_assert!(ok, "deviation from 1/sqrt(2) magnitudes: {dev}");
    }

    #[test]
    fn fourier_basis_is_unbiased(n in 2usize..9) {
        let u = fourier_basis(n).unwrap();
        prop_assert!(u.unitary().unitarity_deviation() < 1e-12);
        prop_assert!(is_unbiased(u.unitary()).unwrap().0);
    }

    #[test]
    fn fold_half_lands_in_half_open_interval(s in -50.0f64..50.0) {
        let f = fold_half(s);
        prop_assert!(f > -0.5 && f <= 0.5);
        // folding is idempotent and periodic
        prop_assert!((fold_half(f) - f).abs() < 1e-12);
        prop_assert!((fold_half(s + 3.0) - f).abs() < 1e-9);
    }

    #[test]
    fn fold_pi_lands_in_half_open_interval(phi in -50.0f64..50.0) {
        let f = fold_pi(phi);
        prop_assert!(f > -std::f64::consts::PI && f <= std::f64::consts::PI);
        let turns = (f - phi) / (2.0 * std::f64::consts::PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn grid_conjugation_is_involutive(
        lo in -20.0f64..19.0,
        width in 0.5f64..40.0,
        log2n in 4u32..13,
    ) {
        let g = Grid::new(lo, lo + width, 1usize << log2n).unwrap();
        prop_assert!(g.conjugate().conjugate().compatible(&g));
    }

    #[test]
    fn conjugate_transform_preserves_norm_and_is_invertible(
        center in -1.0f64..1.0,
        sigma in 0.05f64..0.4,
        k in -8.0f64..8.0,
    ) {
        let grid = Grid::new(-8.0, 8.0, 4096).unwrap();
        let psi = gaussian(grid, center, sigma, k);
        let phi = conjugate_transform(&psi);
        prop_assert!((phi.norm() - 1.0).abs() < 1e-10);
        // the kernel sign flips with the space, so a second transform
        // inverts the first
        let back = conjugate_transform(&phi);
        prop_assert!((back.norm() - 1.0).abs() < 1e-10);
        prop_assert!((back.inner(&psi).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kick_spectrum_is_exactly_rational(n in 2usize..30, d in 0.1f64..10.0) {
        let spec = kick_spectrum(n, d, true).unwrap();
        let mut total = 0.0;
        for kick in &spec.kicks {
            let (num, den) = kick.ratio;
            let expected = 2.0 * std::f64::consts::PI * num as f64 / (den as f64 * d);
            prop_assert!((kick.momentum - expected).abs() <= 1e-15 * expected.abs().max(1.0));
            total += kick.probability;
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_round_trip_restores_components(
        t1 in -3.1f64..3.1,
        t2 in -3.1f64..3.1,
        t3 in -3.1f64..3.1,
    ) {
        let slits = SlitArray::new(2, 1.0, 0.05, Profile::Gaussian, Origin::AtZero).unwrap();
        let grid = slits.default_grid();
        let state = entangle(&make_slit_states(&slits, &grid).unwrap()).unwrap();
        let u = general_two_slit_basis(t1, t2, t3);
        let back = state
            .change_basis(u.unitary())
            .unwrap()
            .change_basis(&u.unitary().adjoint())
            .unwrap();
        for j in 0..2 {
            let (a, _) = state.condition(j).unwrap();
            let (b, _) = back.condition(j).unwrap();
            let overlap = a.inner(&b).unwrap().norm();
            prop_assert!((overlap - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_in_range(seed in any::<u64>()) {
        let slits = SlitArray::new(2, 1.0, 0.05, Profile::Gaussian, Origin::AtZero).unwrap();
        let grid = slits.default_grid();
        let state = entangle(&make_slit_states(&slits, &grid).unwrap()).unwrap();
        let a = sample(&state, 200, seed).unwrap();
        let b = sample(&state, 200, seed).unwrap();
        prop_assert_eq!(&a.records, &b.records);
        for r in &a.records {
            prop_assert!(r.outcome < 2);
            prop_assert!(r.x >= grid.x_min && r.x <= grid.x_max);
        }
    }
}
