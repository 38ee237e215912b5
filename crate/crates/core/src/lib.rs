//! Numerical toolkit for the quantum Zeno blockade in a driven two-mode
//! bosonic system with cross-Kerr coupling.
//!
//! Conventions used throughout the crate:
//!
//! * ħ = 1; every frequency and rate is an angular frequency expressed in a
//!   caller-chosen rate unit (the scenario layer uses the cross-Kerr coupling
//!   `g`, so `g == 1`). Times are in the inverse of that unit.
//! * The composite basis |n⟩⊗|m⟩ (n photons, m phonons) is ordered as
//!   `index(n, m) = n * (cutoff_b + 1) + m`.
//! * Displacement operators follow `D(α) = exp(α* a − α a†)`.

// `!(x > 0.0)` also rejects NaN, which the suggested rewrite would not
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod lindblad;
pub mod model;
pub mod observables;
pub mod zeno;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, HilbertSpec, Mode, Operator, Space};

/// Complex scalar used by every matrix in the crate.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
