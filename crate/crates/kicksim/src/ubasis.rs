//! Detector bases: general unitaries, the d+/d- basis, the three-slit
//! alpha/beta/gamma basis, the n-slit Fourier basis, and the general
//! phase-parametrized two-slit unbiased basis.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// An n x n unitary, row-major.
///
/// Convention: column k holds the old which-way vector |d_k> expressed in
/// the new basis, U_jk = <new_j|d_k>. Conditioning on new-basis outcome j
/// after a basis change therefore yields <new_j|Psi> directly.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    n: usize,
    entries: Vec<C64>,
    tag: String,
}

impl Unitary {
    pub fn from_rows(rows: Vec<Vec<C64>>, tag: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        if n < 1 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rows.iter().map(|r| r.len()).find(|&l| l != n).unwrap_or(0),
            });
        }
        let u = Unitary {
            n,
            entries: rows.into_iter().flatten().collect(),
            tag: tag.into(),
        };
        u.check_unitary(1e-10)?;
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            entries[j * n + j] = C64::new(1.0, 0.0);
        }
        Unitary {
            n,
            entries,
            tag: "identity".to_string(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.entries[j * self.n + k]
    }

    pub fn adjoint(&self) -> Unitary {
        let mut entries = vec![C64::new(0.0, 0.0); self.n * self.n];
        for j in 0..self.n {
            for k in 0..self.n {
                entries[j * self.n + k] = self.entry(k, j).conj();
            }
        }
        Unitary {
            n: self.n,
            entries,
            tag: format!("{}-adjoint", self.tag),
        }
    }

    /// max |(U U^dag - I)_jk|
    pub fn unitarity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for j in 0..self.n {
            for k in 0..self.n {
                let mut s = C64::new(0.0, 0.0);
                for l in 0..self.n {
                    s += self.entry(j, l) * self.entry(k, l).conj();
                }
                let target = if j == k { 1.0 } else { 0.0 };
                dev = dev.max((s - target).norm());
            }
        }
        dev
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let dev = self.unitarity_deviation();
        if dev > tol {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(())
    }

    /// Multiply each row by a global phase so the entry in column 0 is
    /// real and nonnegative. Row phases are unobservable in any
    /// conditioned pattern.
    pub fn with_canonical_row_phases(&self) -> Unitary {
        let mut out = self.clone();
        for j in 0..self.n {
            let e = self.entry(j, 0);
            if e.norm() > 1e-14 {
                let phase = e / e.norm();
                for k in 0..self.n {
                    out.entries[j * self.n + k] = self.entry(j, k) * phase.conj();
                }
            }
        }
        out
    }

    /// 2x2 real rotation by `angle`; biased for any angle not congruent
    /// to pi/4 mod pi/2.
    pub fn rotation2(angle: f64) -> Unitary {
        let (s, c) = angle.sin_cos();
        Unitary {
            n: 2,
            entries: vec![
                C64::new(c, 0.0),
                C64::new(-s, 0.0),
                C64::new(s, 0.0),
                C64::new(c, 0.0),
            ],
            tag: format!("rotation-{angle}"),
        }
    }
}

/// A unitary whose entries all have magnitude 1/sqrt(n): every new basis
/// vector is unbiased with respect to every which-way vector.
#[derive(Debug, Clone, PartialEq)]
pub struct UnbiasedBasis {
    unitary: Unitary,
}

impl UnbiasedBasis {
    pub fn from_unitary(unitary: Unitary) -> Result<Self> {
        let (ok, dev) = is_unbiased(&unitary)?;
        if !ok {
            return Err(Error::NotUnbiased { deviation: dev });
        }
        Ok(UnbiasedBasis { unitary })
    }

    pub fn unitary(&self) -> &Unitary {
        &self.unitary
    }

    pub fn n(&self) -> usize {
        self.unitary.n()
    }
}

/// True iff every |U_jk| equals 1/sqrt(n) within 1e-10; also reports the
/// largest deviation. Errors if `u` is not unitary.
pub fn is_unbiased(u: &Unitary) -> Result<(bool, f64)> {
    u.check_unitary(1e-10)?;
    let target = 1.0 / (u.n() as f64).sqrt();
    let mut dev: f64 = 0.0;
    for j in 0..u.n() {
        for k in 0..u.n() {
            dev = dev.max((u.entry(j, k).norm() - target).abs());
        }
    }
    Ok((dev < 1e-10, dev))
}

/// The Fourier basis built from n-th roots of unity:
/// U_jk = exp(i 2 pi j k / n) / sqrt(n) (0-based indices).
///
/// For n = 2 this is the d+/d- basis. Row 0 carries no phases, so the
/// outcome-0 conditional state is the undisturbed superposition.
pub fn fourier_basis(n: usize) -> Result<UnbiasedBasis> {
    if n < 2 {
        return Err(Error::InvalidDimension { n });
    }
    let norm = 1.0 / (n as f64).sqrt();
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            // reduce j*k mod n before the trig call to keep phases exact-ish
            let jk = (j * k) % n;
            let theta = 2.0 * PI * jk as f64 / n as f64;
            entries.push(C64::from_polar(norm, theta));
        }
    }
    let unitary = Unitary {
        n,
        entries,
        tag: format!("fourier-{n}"),
    };
    UnbiasedBasis::from_unitary(unitary)
}

/// The three-slit alpha/beta/gamma basis for the centered layout
/// (slits at -d, 0, d): phases are centered on the middle slit.
pub fn three_slit_centered_basis() -> UnbiasedBasis {
    let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let norm = 1.0 / 3f64.sqrt();
    let one = C64::new(1.0, 0.0);
    let rows = vec![
        vec![one, one, one],
        vec![w.conj(), one, w],
        vec![w, one, w.conj()],
    ];
    let entries = rows
        .into_iter()
        .flatten()
        .map(|c| c * norm)
        .collect();
    UnbiasedBasis::from_unitary(Unitary {
        n: 3,
        entries,
        tag: "three-slit-centered".to_string(),
    })
    .expect("hard-coded basis is unbiased")
}

/// The most general two-slit basis unbiased with respect to the
/// which-way vectors, parametrized by three free phases. The fourth is
/// fixed by orthogonality: theta4 = theta3 - theta1 + theta2 + pi.
///
/// Columns follow the d_1, d_2 expansions literally, so the free phases
/// survive into the conditional states (no row canonicalization here).
pub fn general_two_slit_basis(theta1: f64, theta2: f64, theta3: f64) -> UnbiasedBasis {
    let theta4 = theta3 - theta1 + theta2 + PI;
    let norm = std::f64::consts::FRAC_1_SQRT_2;
    let entries = vec![
        C64::from_polar(norm, theta1),
        C64::from_polar(norm, theta3),
        C64::from_polar(norm, theta2),
        C64::from_polar(norm, theta4),
    ];
    UnbiasedBasis::from_unitary(Unitary {
        n: 2,
        entries,
        tag: "general-two-slit".to_string(),
    })
    .expect("phase constraint guarantees unitarity")
}
