//! Third derivatives of the potential energy at equilibrium.

use serde::{Deserialize, Serialize};

use crate::chain::ChainSolution;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::tensor::Tensor3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubicKind {
    /// B_ijk = d^3 V / dq_i dq_j dq_k along the axis.
    Axial,
    /// B~_ijk, weighting q_k^(3) q_i^(a) q_j^(a) in the axial-transversal terms.
    Transversal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicTensor {
    pub kind: CubicKind,
    /// J/m^3
    pub values: Tensor3,
}

impl CubicTensor {
    pub fn n(&self) -> usize {
        self.values.dim()
    }
}

/// Adds `f * (delta_ij - delta_qj)(delta_ik - delta_qk)` for a single pair.
fn add_pair(t: &mut Tensor3, i: usize, q: usize, f: f64) {
    t[(i, i, i)] += f;
    t[(i, i, q)] -= f;
    t[(i, q, i)] -= f;
    t[(i, q, q)] += f;
}

pub fn cubic_tensor_axial(chain: &ChainSolution, cfg: &Configuration) -> CubicTensor {
    let u = &chain.u;
    let n = u.len();
    let scale = -6.0 * cfg.species_mass * cfg.omega_z * cfg.omega_z / chain.length_scale;
    let mut t = Tensor3::zeros(n);
    for i in 0..n {
        for q in (0..n).filter(|&q| q != i) {
            let d = u[i] - u[q];
            add_pair(&mut t, i, q, scale * d / d.abs().powi(5));
        }
    }
    CubicTensor {
        kind: CubicKind::Axial,
        values: t,
    }
}

pub fn cubic_tensor_transversal(chain: &ChainSolution, cfg: &Configuration) -> CubicTensor {
    let u = &chain.u;
    let n = u.len();
    let scale = cfg.species_mass * cfg.omega_z * cfg.omega_z / (2.0 * chain.length_scale);
    let mut t = Tensor3::zeros(n);
    for i in 0..n {
        for q in (0..n).filter(|&q| q != i) {
            let d = u[q] - u[i];
            add_pair(&mut t, i, q, scale * d.signum() / d.powi(4));
        }
    }
    CubicTensor {
        kind: CubicKind::Transversal,
        values: t,
    }
}

/// Adds a local cubic trap term `alpha_n / 6 (z_n - z_n0)^3` to an axial tensor.
pub fn add_trap_anharmonicity(b: &CubicTensor, alpha_n: &[f64]) -> Result<CubicTensor> {
    if b.kind != CubicKind::Axial {
        return Err(Error::invalid("alpha_n", "trap anharmonicity applies to the axial tensor"));
    }
    if alpha_n.len() != b.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} anharmonicities for {} ions",
            alpha_n.len(),
            b.n()
        )));
    }
    let mut out = b.clone();
    for (i, a) in alpha_n.iter().enumerate() {
        out.values[(i, i, i)] += a;
    }
    Ok(out)
}

/// Energy scale 6 m omega_z^2 / l of the Coulomb anharmonicity, J/m^3.
pub fn coulomb_cubic_scale(chain: &ChainSolution, cfg: &Configuration) -> f64 {
    6.0 * cfg.species_mass * cfg.omega_z * cfg.omega_z / chain.length_scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::solve_equilibrium;

    fn setup(n: usize) -> (Configuration, ChainSolution) {
        let cfg = Configuration::yb171_130khz(n, 19.0).unwrap();
        let chain = solve_equilibrium(&cfg).unwrap();
        (cfg, chain)
    }

    #[test]
    fn single_ion_has_no_coulomb_cubic() {
        let (cfg, chain) = setup(1);
        assert_eq!(cubic_tensor_axial(&chain, &cfg).values.max_abs(), 0.0);
        assert_eq!(cubic_tensor_transversal(&chain, &cfg).values.max_abs(), 0.0);
    }

    #[test]
    fn axial_tensor_is_symmetric_and_odd_under_inversion() {
        let (cfg, chain) = setup(5);
        let b = cubic_tensor_axial(&chain, &cfg).values;
        assert!(b.symmetry_defect() < 1e-10);
        let n = 5;
        let scale = b.max_abs();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mirrored = b[(n - 1 - i, n - 1 - j, n - 1 - k)];
                    assert!((b[(i, j, k)] + mirrored).abs() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn two_ion_transversal_sign_pattern() {
        let (cfg, chain) = setup(2);
        let t = cubic_tensor_transversal(&chain, &cfg).values;
        let d = chain.u[1] - chain.u[0];
        let f = cfg.species_mass * cfg.omega_z.powi(2) / (2.0 * chain.length_scale) / d.powi(4);
        // ion 0 has its partner to the right, ion 1 to the left
        assert!((t[(0, 0, 0)] - f).abs() < 1e-12 * f);
        assert!((t[(0, 0, 1)] + f).abs() < 1e-12 * f);
        assert!((t[(0, 1, 1)] - f).abs() < 1e-12 * f);
        assert!((t[(1, 1, 1)] + f).abs() < 1e-12 * f);
        assert!((t[(1, 1, 0)] - f).abs() < 1e-12 * f);
        assert!((t[(0, 0, 1)] + t[(0, 0, 0)]).abs() < 1e-12 * f);
    }

    #[test]
    fn transversal_is_twelfth_of_axial() {
        let (cfg, chain) = setup(4);
        let b = cubic_tensor_axial(&chain, &cfg).values;
        let bt = cubic_tensor_transversal(&chain, &cfg).values;
        for (x, y) in b.as_slice().iter().zip(bt.as_slice()) {
            assert!((x - 12.0 * y).abs() <= 1e-12 * b.max_abs());
        }
    }

    #[test]
    fn anharmonicity_touches_only_the_diagonal() {
        let (cfg, chain) = setup(3);
        let b = cubic_tensor_axial(&chain, &cfg);
        assert_eq!(add_trap_anharmonicity(&b, &[0.0; 3]).unwrap(), b);
        let alpha = 1.5e-3;
        let shifted = add_trap_anharmonicity(&b, &[alpha; 3]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let want = if i == j && j == k { alpha } else { 0.0 };
                    assert!((shifted.values[(i, j, k)] - b.values[(i, j, k)] - want).abs() <= 1e-12 * alpha);
                }
            }
        }
        assert!(add_trap_anharmonicity(&b, &[1.0; 2]).is_err());
    }
}
