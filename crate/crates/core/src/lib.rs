//! Plane-wave dispersion branches, non-resonant momentum sets, regularized
//! eigenfunction wave packets and ballistic transport measurements for
//! two-dimensional Schrödinger operators `-Δ + V` with limit-periodic and
//! quasi-periodic potentials.

pub mod error;
pub mod bloch;
pub mod dynamics;
pub mod grid;
pub mod nonresonant;
pub mod potentials;
pub mod scenario;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{DualWindow, Fft2, Grid2, KRect};
