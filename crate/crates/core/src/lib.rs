//! Effective interactions of a linear trapped-ion chain in a static magnetic
//! field gradient.
//!
//! The crate solves the classical crystal, diagonalizes the motional modes,
//! expands the potential to third order and contracts everything into the
//! spin-spin, three-spin, spin-phonon and local-field strengths that survive
//! the polaron transformation. The [`oracle`] module re-derives the same
//! coefficients by brute force in a truncated Fock space.
//!
//! All internal quantities are SI with angular frequencies (rad/s).

pub mod chain;
pub mod config;
pub mod constants;
pub mod coupling;
pub mod cubic;
mod error;
pub mod field;
pub mod model;
pub mod oracle;
pub mod tensor;

pub use chain::{ChainSolution, Direction, ModeDecomposition};
pub use config::{Configuration, SignConvention};
pub use constants::PhysicalConstants;
pub use coupling::CouplingReport;
pub use cubic::{CubicKind, CubicTensor};
pub use error::{Error, Result};
pub use field::{FieldProfile, ResonanceProfile};
pub use model::ChainModel;
pub use tensor::Tensor3;

/// Converts an angular frequency (rad/s) to ordinary frequency (Hz).
#[inline]
pub fn to_hz(angular: f64) -> f64 {
    angular / std::f64::consts::TAU
}

/// Converts an ordinary frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn from_hz(hz: f64) -> f64 {
    hz * std::f64::consts::TAU
}
