//! Brute-force check of the effective couplings in a truncated Fock space.
//!
//! The spin part of the Hamiltonian is diagonal in the Z basis, so every
//! operator here is block diagonal: one phonon-space block per spin
//! configuration `s in {+1, -1}^N`. Blocks are real symmetric and expressed
//! as `H / hbar` in rad/s. Spin configuration `b` has `s_n = +1` when bit `n`
//! of `b` is clear. Phonon basis states are ordered with mode 0 most
//! significant.

mod extract;
mod hamiltonian;
mod jacobi;
mod polaron;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use extract::{extract_coefficients, extract_sector, label, run_oracle, run_oracle_with, OracleResult};
pub use hamiltonian::{build_hamiltonian, OracleInputs};
pub use jacobi::jacobi_eigenvalues;
pub use polaron::{
    displacement, full_space_unitary, polaron_transform, polaron_unitary, shifted_annihilation,
};

pub const MAX_IONS: usize = 3;
pub const MAX_DIMENSION: usize = 200_000;

/// Leakage into the cutoff shell above which results are flagged.
pub const LEAKAGE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Order {
    /// Quadratic potential only.
    Two,
    /// Adds the cubic phonon term.
    Three,
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            2 => Ok(Order::Two),
            3 => Ok(Order::Three),
            _ => Err(Error::invalid("order", "must be 2 or 3")),
        }
    }
}

/// Spins times truncated oscillators, `dimension = 2^N (cutoff + 1)^modes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TruncatedSpace {
    pub n_ions: usize,
    pub n_modes: usize,
    pub cutoff: usize,
    pub dimension: usize,
}

impl TruncatedSpace {
    pub fn new(n_ions: usize, n_modes: usize, cutoff: usize) -> Result<Self> {
        if n_ions == 0 || n_ions > MAX_IONS {
            return Err(Error::invalid("n_ions", format!("oracle supports 1 to {MAX_IONS} ions")));
        }
        if cutoff == 0 {
            return Err(Error::invalid("cutoff", "must be at least 1"));
        }
        let dimension = (cutoff + 1)
            .checked_pow(n_modes as u32)
            .and_then(|d| d.checked_mul(1 << n_ions))
            .filter(|&d| d <= MAX_DIMENSION)
            .ok_or(Error::DimensionGuard {
                dimension: (cutoff + 1).saturating_pow(n_modes as u32).saturating_mul(1 << n_ions),
                limit: MAX_DIMENSION,
            })?;
        Ok(TruncatedSpace {
            n_ions,
            n_modes,
            cutoff,
            dimension,
        })
    }

    pub fn levels(&self) -> usize {
        self.cutoff + 1
    }

    pub fn n_spin_configs(&self) -> usize {
        1 << self.n_ions
    }

    pub fn block_dim(&self) -> usize {
        self.levels().pow(self.n_modes as u32)
    }

    /// `s_n` for configuration `b`.
    pub fn spins(&self, b: usize) -> Vec<f64> {
        (0..self.n_ions).map(|n| if b >> n & 1 == 0 { 1.0 } else { -1.0 }).collect()
    }

    /// Basis index of the phonon state with the given occupations.
    pub fn phonon_index(&self, occupations: &[usize]) -> usize {
        assert_eq!(occupations.len(), self.n_modes);
        occupations.iter().fold(0, |acc, &n| {
            assert!(n <= self.cutoff);
            acc * self.levels() + n
        })
    }

    /// Occupations of basis state `p`.
    pub fn occupations(&self, mut p: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_modes];
        for slot in out.iter_mut().rev() {
            *slot = p % self.levels();
            p /= self.levels();
        }
        out
    }
}

/// Block-diagonal operator, one phonon block per spin configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinBlockOperator {
    pub space: TruncatedSpace,
    pub blocks: Vec<DMatrix<f64>>,
}

impl SpinBlockOperator {
    /// Full matrix, spin index most significant.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.space.block_dim();
        let mut m = DMatrix::zeros(self.space.dimension, self.space.dimension);
        for (b, block) in self.blocks.iter().enumerate() {
            m.view_mut((b * d, b * d), (d, d)).copy_from(block);
        }
        m
    }

    /// max |H - H^T| over all blocks.
    pub fn hermiticity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (b - b.transpose()).amax())
            .fold(0.0, f64::max)
    }

    /// All eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.clone().symmetric_eigen().eigenvalues.iter().copied().collect::<Vec<_>>())
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Single-mode `a` in the truncated basis.
pub(crate) fn annihilation(levels: usize) -> DMatrix<f64> {
    DMatrix::from_fn(levels, levels, |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 })
}

/// `op` acting on mode `l`, identity elsewhere.
pub(crate) fn embed(op: &DMatrix<f64>, l: usize, space: &TruncatedSpace) -> DMatrix<f64> {
    embed_many(&[(l, op)], space)
}

/// Kronecker product over all modes with the given per-mode factors.
pub(crate) fn embed_many(ops: &[(usize, &DMatrix<f64>)], space: &TruncatedSpace) -> DMatrix<f64> {
    let id = DMatrix::identity(space.levels(), space.levels());
    let mut out = DMatrix::from_element(1, 1, 1.0);
    for mode in 0..space.n_modes {
        let factor = ops.iter().find(|(l, _)| *l == mode).map_or(&id, |(_, op)| *op);
        out = out.kronecker(factor);
    }
    out
}
