//! Numerical laboratory for n-slit which-way interference: entangled
//! particle-detector states, screen patterns under arbitrary detector
//! bases, and certification that the entanglement and momentum-kick
//! descriptions of interference loss agree.

pub mod config;
pub mod driver;
pub mod error;
pub mod grid;
pub mod kicks;
pub mod montecarlo;
pub mod patterns;
pub mod propagate;
pub mod pspace;
pub mod qstate;
pub mod report;
pub mod ubasis;
pub mod verify;
pub mod wavefunction;

pub use error::{Error, Result};
pub use grid::Grid;
pub use qstate::{EntangledState, Origin, Profile, SlitArray};
pub use ubasis::{fourier_basis, UnbiasedBasis, Unitary};
pub use wavefunction::{Space, WaveFunction};
