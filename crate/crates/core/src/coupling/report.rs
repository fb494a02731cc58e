use serde::{Deserialize, Serialize};

use super::{
    coinciding_index_fields, coupling_matrix_full, curvature_estimate, local_field_corrections, phonon_resonance_gap,
    spin_phonon_magnitudes, three_body_coulomb, three_body_curvature, three_body_trap,
    trap_estimate, CurvatureCouplings, ResonanceGap, SpinPhononMagnitudes, ThreeBodyMap,
    TransversalCorrections,
};
use crate::error::Result;
use crate::model::ChainModel;

/// All interaction strengths for one configuration. Frequencies in rad/s,
/// `c` in J, indices 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub n_ions: usize,
    pub mode_frequencies: Vec<f64>,
    pub eps: Vec<Vec<f64>>,
    pub j2: Vec<Vec<f64>>,
    pub c: Vec<Vec<Vec<f64>>>,
    pub j3_coulomb: ThreeBodyMap,
    pub j3_trap: ThreeBodyMap,
    pub j3_trap_estimate: f64,
    pub j3_curvature: CurvatureCouplings,
    pub j3_curvature_estimate: f64,
    pub local_field: Vec<f64>,
    pub spin_phonon: SpinPhononMagnitudes,
    pub resonance_gap: ResonanceGap,
    /// Present when radial trap frequencies are configured and the field has
    /// no transversal gradient.
    pub transversal: Option<TransversalCorrections>,
}

impl CouplingReport {
    pub fn compute(model: &ChainModel) -> Result<Self> {
        let hbar = model.hbar();
        let cfg = &model.cfg;
        let n = model.n_ions();
        let j2 = model.j2();
        let j_full = coupling_matrix_full(&model.eps, &model.axial);

        let mean_domega = model.resonance.domega.iter().sum::<f64>() / n as f64;
        let mean_alpha = cfg.alpha_n.iter().sum::<f64>() / n as f64;
        let mean_d2omega = model.resonance.d2omega.iter().sum::<f64>() / n as f64;

        let transversal = match (&model.transversal, cfg.db_dtransversal) {
            (Some(_), [0.0, 0.0]) => Some(model.transversal_corrections()?),
            _ => None,
        };

        Ok(CouplingReport {
            n_ions: n,
            mode_frequencies: model.axial.nu.clone(),
            eps: rows(&model.eps.eps),
            j2: rows(&j2),
            c: model.c_total.to_nested(),
            j3_coulomb: three_body_coulomb(&model.c_coulomb, &model.eps, hbar),
            j3_trap: three_body_trap(&j_full, &model.resonance, &cfg.alpha_n, hbar)?,
            j3_trap_estimate: trap_estimate(cfg, mean_alpha, mean_domega),
            j3_curvature: three_body_curvature(&j_full, &model.resonance),
            j3_curvature_estimate: curvature_estimate(cfg, mean_domega, mean_d2omega),
            local_field: local_field_corrections(&model.c_total, &model.eps, &cfg.phonon_occupations, hbar)?,
            spin_phonon: spin_phonon_magnitudes(&model.c_total, &model.eps, hbar),
            resonance_gap: phonon_resonance_gap(&model.axial),
            transversal,
        })
    }

    /// Single-spin terms from coinciding indices of the cubic spin polynomial.
    pub fn coinciding_index_fields(model: &ChainModel) -> Vec<f64> {
        coinciding_index_fields(&model.c_total, &model.eps, model.hbar())
    }

    pub fn j2_max(&self) -> f64 {
        self.off_diagonal().fold(0.0, f64::max)
    }

    pub fn j2_min(&self) -> f64 {
        let min = self.off_diagonal().fold(f64::INFINITY, f64::min);
        if min.is_finite() {
            min
        } else {
            0.0
        }
    }

    fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        self.j2
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().filter(move |(j, _)| *j > i).map(|(_, v)| *v))
    }
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}
