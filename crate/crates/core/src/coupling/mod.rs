//! Contractions of mode data, field derivatives and cubic tensors into
//! effective interaction strengths.
//!
//! Conventions used throughout:
//!
//! * all strengths are angular frequencies (rad/s), tensors in mode frame
//!   are energies (J);
//! * ion and mode indices are 0-based;
//! * `J2` enters the effective Hamiltonian as `-(hbar/2) sum_{i<j} J_ij Z_i Z_j`
//!   (the full matrix, with its diagonal, is kept for formulas that need it);
//! * `J3` maps from the cubic potential are coefficients of `hbar Z_i Z_j Z_k`
//!   for `i < j < k`;
//! * curvature maps follow `-(hbar/4) sum_{ijk} J_ijk Z_i Z_j Z_k`, i.e. a
//!   distinct triple carries `-(hbar/2) J~_ijk`.

mod cubic_terms;
mod curvature;
mod report;
mod transversal;
mod trap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::{Direction, ModeDecomposition};
use crate::error::{Error, Result};
use crate::field::ResonanceProfile;

pub use cubic_terms::{
    coinciding_index_fields, local_field_corrections, mode_frame_cubic, phonon_resonance_gap,
    spin_phonon_magnitudes, three_body_coulomb, three_spin_tensor, ResonanceGap,
    SpinPhononMagnitudes,
};
pub use curvature::{curvature_estimate, three_body_curvature, CurvatureCouplings, CurvatureEntry};
pub use report::CouplingReport;
pub use transversal::{transversal_corrections, transversal_cubic, TransversalCorrections};
pub use trap::{
    anharmonicity_ratio, center_of_mass_lamb_dicke, stability_bound, three_body_trap,
    trap_estimate,
};

/// Effective Lamb-Dicke parameters of one direction, ions x modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambDickeMatrix {
    pub direction: Direction,
    pub eps: DMatrix<f64>,
}

impl LambDickeMatrix {
    pub fn is_zero(&self) -> bool {
        self.eps.iter().all(|&x| x == 0.0)
    }
}

/// `eps_nl = dz_l domega_n S_nl / nu_l` with a per-ion resonance gradient.
pub fn lamb_dicke_with(modes: &ModeDecomposition, domega: &[f64]) -> Result<LambDickeMatrix> {
    let n = modes.s.nrows();
    if domega.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} resonance gradients for {n} ions",
            domega.len()
        )));
    }
    let eps = DMatrix::from_fn(n, modes.n_modes(), |i, l| {
        modes.dz[l] * domega[i] * modes.s[(i, l)] / modes.nu[l]
    });
    Ok(LambDickeMatrix {
        direction: modes.direction,
        eps,
    })
}

/// Lamb-Dicke matrix for the direction of `modes`, taking the matching
/// resonance gradient from `res`.
pub fn lamb_dicke(modes: &ModeDecomposition, res: &ResonanceProfile) -> Result<LambDickeMatrix> {
    match modes.direction {
        Direction::Axial => lamb_dicke_with(modes, &res.domega),
        Direction::Transversal1 => lamb_dicke_with(modes, &vec![res.domega_transversal[0]; res.n_ions()]),
        Direction::Transversal2 => lamb_dicke_with(modes, &vec![res.domega_transversal[1]; res.n_ions()]),
    }
}

/// `sum_l nu_l eps_il eps_jl` for one direction, diagonal included.
pub fn coupling_matrix_full(eps: &LambDickeMatrix, modes: &ModeDecomposition) -> DMatrix<f64> {
    let nu = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&modes.nu));
    let j = &eps.eps * nu * eps.eps.transpose();
    // exact symmetry regardless of summation order
    (&j + j.transpose()) * 0.5
}

/// Spin-spin couplings summed over the given directions, zero diagonal.
pub fn spin_spin_couplings(directions: &[(&LambDickeMatrix, &ModeDecomposition)]) -> DMatrix<f64> {
    let mut j = spin_spin_full(directions);
    j.fill_diagonal(0.0);
    j
}

/// As [`spin_spin_couplings`] but keeping the diagonal.
pub fn spin_spin_full(directions: &[(&LambDickeMatrix, &ModeDecomposition)]) -> DMatrix<f64> {
    let n = directions.first().map_or(0, |(e, _)| e.eps.nrows());
    directions
        .iter()
        .filter(|(e, _)| !e.is_zero())
        .fold(DMatrix::zeros(n, n), |acc, (e, m)| acc + coupling_matrix_full(e, m))
}

/// Coupling of a strictly ordered ion triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleCoupling {
    pub ions: [usize; 3],
    /// rad/s
    pub value: f64,
}

/// Three-spin couplings keyed by `i < j < k`, in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThreeBodyMap(pub Vec<TripleCoupling>);

impl ThreeBodyMap {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    out.push(TripleCoupling {
                        ions: [i, j, k],
                        value: f(i, j, k),
                    });
                }
            }
        }
        ThreeBodyMap(out)
    }

    /// Value for three distinct ions given in any order.
    pub fn get(&self, a: usize, b: usize, c: usize) -> Option<f64> {
        let mut key = [a, b, c];
        key.sort_unstable();
        self.0.iter().find(|t| t.ions == key).map(|t| t.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &TripleCoupling> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry of largest magnitude (first one on ties).
    pub fn max_abs(&self) -> Option<&TripleCoupling> {
        self.0
            .iter()
            .fold(None, |best: Option<&TripleCoupling>, t| match best {
                Some(b) if b.value.abs() >= t.value.abs() => Some(b),
                _ => Some(t),
            })
    }

    pub fn max_abs_value(&self) -> f64 {
        self.max_abs().map_or(0.0, |t| t.value.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{axial_modes, solve_equilibrium};
    use crate::config::Configuration;
    use crate::field::{resonance_profile, FieldProfile};
    use crate::to_hz;

    fn couplings(n: usize, grad: f64) -> DMatrix<f64> {
        let cfg = Configuration::yb171_130khz(n, grad).unwrap();
        let chain = solve_equilibrium(&cfg).unwrap();
        let modes = axial_modes(&chain, &cfg).unwrap();
        let res = resonance_profile(&FieldProfile::from_config(&cfg), &chain, &cfg);
        let eps = lamb_dicke(&modes, &res).unwrap();
        spin_spin_couplings(&[(&eps, &modes)])
    }

    #[test]
    fn zero_gradient_gives_zero_couplings() {
        assert!(couplings(4, 0.0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_ion_lamb_dicke() {
        let cfg = Configuration::yb171_130khz(1, 150.0).unwrap();
        let chain = solve_equilibrium(&cfg).unwrap();
        let modes = axial_modes(&chain, &cfg).unwrap();
        let res = resonance_profile(&FieldProfile::from_config(&cfg), &chain, &cfg);
        let eps = lamb_dicke(&modes, &res).unwrap();
        let want = res.domega[0].abs() * cfg.oscillator_width(cfg.omega_z) / cfg.omega_z;
        assert!((eps.eps[(0, 0)].abs() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn five_ion_couplings_are_mirror_symmetric() {
        let j = couplings(5, 19.0);
        assert!((to_hz(j[(0, 1)]) - 26.5).abs() < 0.2);
        assert!((to_hz(j[(0, 4)]) - 12.9).abs() < 0.2);
        assert!((j[(0, 1)] / j[(3, 4)] - 1.0).abs() < 1e-12);
        assert_eq!(j, j.transpose());
        assert!((0..5).all(|i| j[(i, i)] == 0.0));
    }

    #[test]
    fn map_lookup_ignores_order() {
        let m = ThreeBodyMap::from_fn(4, |i, j, k| (100 * i + 10 * j + k) as f64);
        assert_eq!(m.len(), 4);
        assert_eq!(m.get(3, 1, 2), Some(123.0));
        assert_eq!(m.get(1, 1, 2), None);
        assert_eq!(m.max_abs().unwrap().ions, [1, 2, 3]);
    }
}
