//! Axial-transversal cubic terms.

use serde::{Deserialize, Serialize};

use super::LambDickeMatrix;
use crate::chain::ModeDecomposition;
use crate::cubic::{CubicKind, CubicTensor};
use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// `C^a_ijk = -3 dz_i da_j da_k sum B~_mnp S3_pi Sa_mj Sa_nk`, J. The first
/// index is an axial mode, the last two are modes of direction `a`.
pub fn transversal_cubic(
    bt: &CubicTensor,
    axial: &ModeDecomposition,
    transversal: &ModeDecomposition,
) -> Result<Tensor3> {
    if bt.kind != CubicKind::Transversal {
        return Err(Error::invalid("cubic", "expected the transversal cubic tensor"));
    }
    let s3 = axial.scaled_participation();
    let sa = transversal.scaled_participation();
    // B~ is fully symmetric, so the axial index may be contracted first.
    let mut c = bt.values.transform_each(&s3, &sa, &sa);
    c.scale(-3.0);
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalCorrections {
    /// `sum_a sum_ik C^a_ikk eps_ni (2 n_ak + 1) / hbar` per ion, rad/s.
    pub local_field: Vec<f64>,
    /// max over both directions of |C^a_ijk| / hbar, rad/s.
    pub mode_coupling_max: f64,
}

/// Local-field and mode-coupling strengths from the axial-transversal terms,
/// for a field without transversal gradient.
pub fn transversal_corrections(
    c_alpha: &[Tensor3; 2],
    eps_axial: &LambDickeMatrix,
    occupations: &[u32],
    hbar: f64,
) -> Result<TransversalCorrections> {
    let n_ions = eps_axial.eps.nrows();
    let n_modes = eps_axial.eps.ncols();
    if occupations.len() != n_modes || c_alpha.iter().any(|c| c.dim() != n_modes) {
        return Err(Error::DimensionMismatch(format!(
            "{} transversal occupations for {n_modes} modes",
            occupations.len()
        )));
    }
    // w_i = sum_a sum_k C^a_ikk (2 n_k + 1)
    let w: Vec<f64> = (0..n_modes)
        .map(|i| {
            c_alpha
                .iter()
                .map(|c| {
                    (0..n_modes)
                        .map(|k| c[(i, k, k)] * (2.0 * occupations[k] as f64 + 1.0))
                        .sum::<f64>()
                })
                .sum()
        })
        .collect();
    let local_field = (0..n_ions)
        .map(|n| (0..n_modes).map(|i| w[i] * eps_axial.eps[(n, i)]).sum::<f64>() / hbar)
        .collect();
    let mode_coupling_max = c_alpha.iter().map(Tensor3::max_abs).fold(0.0, f64::max) / hbar;
    Ok(TransversalCorrections {
        local_field,
        mode_coupling_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{axial_modes, solve_equilibrium, transversal_modes};
    use crate::config::Configuration;
    use crate::cubic::{cubic_tensor_axial, cubic_tensor_transversal};

    #[test]
    fn rejects_axial_tensor() {
        let cfg = Configuration::yb171_130khz(3, 19.0).unwrap().with_radial(1e7);
        let chain = solve_equilibrium(&cfg).unwrap();
        let ax = axial_modes(&chain, &cfg).unwrap();
        let [t1, _] = transversal_modes(&chain, &cfg).unwrap();
        assert!(transversal_cubic(&cubic_tensor_axial(&chain, &cfg), &ax, &t1).is_err());
        let c = transversal_cubic(&cubic_tensor_transversal(&chain, &cfg), &ax, &t1).unwrap();
        // symmetric in the two transversal indices
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((c[(i, j, k)] - c[(i, k, j)]).abs() <= 1e-12 * c.max_abs());
                }
            }
        }
    }
}
