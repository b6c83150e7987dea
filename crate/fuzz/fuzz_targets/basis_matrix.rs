//! Fuzzes custom basis-matrix validation with arbitrary complex entries
//! of arbitrary shape. Construction must reject bad input with an error,
//! never panic, and anything accepted must satisfy the unitarity and
//! unbiasedness predicates it was vetted against.

#![no_main]

use libfuzzer_sys::fuzz_target;
use num_complex::Complex64 as C64;

use kicksim::ubasis::{is_unbiased, UnbiasedBasis, Unitary};

fuzz_target!(|rows: Vec<Vec<(f64, f64)>>| {
    let rows: Vec<Vec<C64>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|(re, im)| C64::new(re, im)).collect())
        .collect();
    let Ok(u) = Unitary::from_rows(rows, "fuzz") else {
        return;
    };
    assert!(u.unitarity_deviation() <= 1e-10);
    if let Ok(b) = UnbiasedBasis::from_unitary(u) {
        let (ok, _) = is_unbiased(b.unitary()).expect("accepted basis stays unitary");
        assert!(ok);
    }
});
