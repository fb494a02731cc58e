//! Everything derived from one configuration, computed once.

use nalgebra::DMatrix;

use crate::chain::{axial_modes, solve_equilibrium, transversal_modes, ChainSolution, ModeDecomposition};
use crate::config::Configuration;
use crate::coupling::{
    lamb_dicke, mode_frame_cubic, spin_spin_couplings, spin_spin_full, transversal_corrections,
    transversal_cubic, LambDickeMatrix, TransversalCorrections,
};
use crate::cubic::{add_trap_anharmonicity, cubic_tensor_axial, cubic_tensor_transversal, CubicTensor};
use crate::error::{Error, Result};
use crate::field::{resonance_profile, FieldProfile, ResonanceProfile};
use crate::tensor::Tensor3;

#[derive(Debug, Clone)]
pub struct ChainModel {
    pub cfg: Configuration,
    pub chain: ChainSolution,
    pub axial: ModeDecomposition,
    /// Present when `omega_radial` is configured.
    pub transversal: Option<[ModeDecomposition; 2]>,
    pub field: FieldProfile,
    pub resonance: ResonanceProfile,
    pub eps: LambDickeMatrix,
    pub eps_transversal: Option<[LambDickeMatrix; 2]>,
    /// Coulomb part of the axial cubic tensor.
    pub b_coulomb: CubicTensor,
    /// Coulomb plus trap anharmonicity.
    pub b_total: CubicTensor,
    pub b_transversal: CubicTensor,
    /// Mode-frame tensors of `b_coulomb` and `b_total`, J.
    pub c_coulomb: Tensor3,
    pub c_total: Tensor3,
}

impl ChainModel {
    pub fn build(cfg: &Configuration) -> Result<Self> {
        let chain = solve_equilibrium(cfg)?;
        let axial = axial_modes(&chain, cfg)?;
        let transversal = match cfg.omega_radial {
            Some(_) => Some(transversal_modes(&chain, cfg)?),
            None => None,
        };
        let field = FieldProfile::from_config(cfg);
        let resonance = resonance_profile(&field, &chain, cfg);
        let eps = lamb_dicke(&axial, &resonance)?;
        let eps_transversal = match &transversal {
            Some([m1, m2]) => Some([lamb_dicke(m1, &resonance)?, lamb_dicke(m2, &resonance)?]),
            None => None,
        };
        let b_coulomb = cubic_tensor_axial(&chain, cfg);
        let b_total = add_trap_anharmonicity(&b_coulomb, &cfg.alpha_n)?;
        let b_transversal = cubic_tensor_transversal(&chain, cfg);
        let c_coulomb = mode_frame_cubic(&b_coulomb, &axial);
        let c_total = if cfg.alpha_n.iter().all(|&a| a == 0.0) {
            c_coulomb.clone()
        } else {
            mode_frame_cubic(&b_total, &axial)
        };
        Ok(ChainModel {
            cfg: cfg.clone(),
            chain,
            axial,
            transversal,
            field,
            resonance,
            eps,
            eps_transversal,
            b_coulomb,
            b_total,
            b_transversal,
            c_coulomb,
            c_total,
        })
    }

    pub fn n_ions(&self) -> usize {
        self.cfg.n_ions
    }

    pub fn hbar(&self) -> f64 {
        self.cfg.constants().hbar
    }

    fn directions(&self) -> Vec<(&LambDickeMatrix, &ModeDecomposition)> {
        let mut d = vec![(&self.eps, &self.axial)];
        if let (Some(e), Some(m)) = (&self.eps_transversal, &self.transversal) {
            d.push((&e[0], &m[0]));
            d.push((&e[1], &m[1]));
        }
        d
    }

    /// Spin-spin couplings over all directions with a gradient, zero diagonal.
    pub fn j2(&self) -> DMatrix<f64> {
        spin_spin_couplings(&self.directions())
    }

    /// Spin-spin couplings including the diagonal self-terms.
    pub fn j2_full(&self) -> DMatrix<f64> {
        spin_spin_full(&self.directions())
    }

    /// Mode-frame axial-transversal tensors for both directions.
    pub fn transversal_cubic(&self) -> Result<[Tensor3; 2]> {
        let [m1, m2] = self.transversal.as_ref().ok_or(Error::MissingRadial)?;
        Ok([
            transversal_cubic(&self.b_transversal, &self.axial, m1)?,
            transversal_cubic(&self.b_transversal, &self.axial, m2)?,
        ])
    }

    pub fn transversal_corrections(&self) -> Result<TransversalCorrections> {
        let c = self.transversal_cubic()?;
        if self.cfg.db_dtransversal.iter().any(|&g| g != 0.0) {
            return Err(Error::TransversalGradient);
        }
        transversal_corrections(&c, &self.eps, &self.cfg.transversal_occupations, self.hbar())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_frequencies_do_not_depend_on_gradient() {
        let a = ChainModel::build(&Configuration::yb171_130khz(6, 0.0).unwrap()).unwrap();
        let b = ChainModel::build(&Configuration::yb171_130khz(6, 150.0).unwrap()).unwrap();
        assert_eq!(a.axial.nu, b.axial.nu);
    }

    #[test]
    fn transversal_needs_radial_frequency() {
        let m = ChainModel::build(&Configuration::yb171_130khz(3, 19.0).unwrap()).unwrap();
        let err = m.transversal_corrections().unwrap_err();
        assert_eq!(err.to_string(), "transversal analysis requires omega_radial");
    }

    #[test]
    fn transversal_gradient_adds_to_couplings() {
        let mut cfg = Configuration::yb171_130khz(3, 19.0).unwrap().with_radial(1e7);
        let plain = ChainModel::build(&cfg).unwrap().j2();
        cfg.db_dtransversal = [19.0, 0.0];
        let model = ChainModel::build(&cfg).unwrap();
        let with = model.j2();
        assert!(with[(0, 1)] != plain[(0, 1)]);
        assert!(matches!(model.transversal_corrections(), Err(Error::TransversalGradient)));
    }
}
