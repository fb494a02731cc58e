use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::polaron::displacement;
use super::{
    annihilation, build_hamiltonian, polaron_transform, OracleInputs, Order, SpinBlockOperator,
    TruncatedSpace, LEAKAGE_THRESHOLD,
};
use crate::coupling::{coinciding_index_fields, coupling_matrix_full, local_field_corrections, three_spin_tensor};
use crate::error::Result;
use crate::model::ChainModel;

/// Spectra are compared only up to this block size.
const SPECTRUM_CHECK_LIMIT: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub space: TruncatedSpace,
    pub order: Order,
    /// Z-string coefficients of the vacuum block of the transformed operator, rad/s.
    pub extracted: BTreeMap<String, f64>,
    /// The same coefficients predicted by the coupling formulas, rad/s.
    pub analytic: BTreeMap<String, f64>,
    /// Largest population the displaced vacuum puts on the cutoff shell.
    pub truncation_error_estimate: f64,
    pub truncation_flagged: bool,
    /// max |D^T D - 1| over the single-mode displacements.
    pub unitarity_defect: f64,
    /// Relative spectral change under the transformation, when checked.
    pub spectrum_defect: Option<f64>,
}

impl OracleResult {
    /// |extracted - analytic| / |analytic| for one label.
    pub fn relative_error(&self, key: &str) -> Option<f64> {
        let (e, a) = (self.extracted.get(key)?, self.analytic.get(key)?);
        Some((e - a).abs() / a.abs())
    }
}

/// `Z1Z3`-style label of the ions in `mask` (1-based).
pub fn label(mask: usize) -> String {
    (0..usize::BITS as usize)
        .filter(|n| mask >> n & 1 == 1)
        .map(|n| format!("Z{}", n + 1))
        .collect()
}

/// Pauli-Z decomposition of the diagonal element `p` of each spin block:
/// `coef_S = 2^-N sum_s E(s) prod_{i in S} s_i`. The identity is omitted.
fn decompose(h: &SpinBlockOperator, p: usize) -> BTreeMap<String, f64> {
    let space = &h.space;
    let configs = space.n_spin_configs();
    let energies: Vec<f64> = h.blocks.iter().map(|b| b[(p, p)]).collect();
    (1..configs)
        .map(|mask| {
            let sum: f64 = (0..configs)
                .map(|b| {
                    let parity = (b & mask).count_ones() % 2;
                    if parity == 0 {
                        energies[b]
                    } else {
                        -energies[b]
                    }
                })
                .sum();
            (label(mask), sum / configs as f64)
        })
        .collect()
}

/// Z-string coefficients of the phonon-vacuum block.
pub fn extract_coefficients(h_tilde: &SpinBlockOperator) -> BTreeMap<String, f64> {
    decompose(h_tilde, 0)
}

/// Z-string coefficients of the block with the given mode occupations.
pub fn extract_sector(h_tilde: &SpinBlockOperator, occupations: &[usize]) -> BTreeMap<String, f64> {
    decompose(h_tilde, h_tilde.space.phonon_index(occupations))
}

fn analytic_coefficients(inputs: &OracleInputs, space: &TruncatedSpace, order: Order) -> Result<BTreeMap<String, f64>> {
    let n = space.n_ions;
    let j = coupling_matrix_full(&inputs.eps, &inputs.modes);
    let (fields, triples) = match order {
        Order::Two => (vec![0.0; n], None),
        Order::Three => {
            let lf = local_field_corrections(&inputs.c, &inputs.eps, &vec![0; space.n_modes], inputs.hbar)?;
            let extra = coinciding_index_fields(&inputs.c, &inputs.eps, inputs.hbar);
            let f = lf.iter().zip(&extra).map(|(a, b)| 0.5 * a + b).collect();
            (f, Some(three_spin_tensor(&inputs.c, &inputs.eps)))
        }
    };
    let mut out = BTreeMap::new();
    for mask in 1..space.n_spin_configs() {
        let ions: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let value = match ions[..] {
            [i] => fields[i],
            [i, k] => -0.5 * j[(i, k)],
            [i, k, m] => triples.as_ref().map_or(0.0, |t| t[(i, k, m)] / inputs.hbar),
            _ => unreachable!("at most three ions"),
        };
        out.insert(label(mask), value);
    }
    Ok(out)
}

fn truncation_diagnostics(inputs: &OracleInputs, space: &TruncatedSpace) -> (f64, f64) {
    let levels = space.levels();
    let a = annihilation(levels);
    let mut leak: f64 = 0.0;
    let mut unitarity: f64 = 0.0;
    for b in 0..space.n_spin_configs() {
        let mut inside = 1.0;
        for beta in displacement(inputs, &space.spins(b)) {
            let d = ((a.transpose() - &a) * beta).exp();
            unitarity = unitarity.max((d.transpose() * &d - DMatrix::identity(levels, levels)).amax());
            inside *= 1.0 - d[(space.cutoff, 0)].powi(2);
        }
        leak = leak.max(1.0 - inside);
    }
    (leak, unitarity)
}

fn spectrum_defect(h: &SpinBlockOperator, h_tilde: &SpinBlockOperator) -> f64 {
    h.blocks
        .iter()
        .zip(&h_tilde.blocks)
        .map(|(x, y)| {
            let mut ex: Vec<f64> = x.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            let mut ey: Vec<f64> = y.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            ex.sort_by(f64::total_cmp);
            ey.sort_by(f64::total_cmp);
            let scale = ex.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            ex.iter().zip(&ey).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / scale
        })
        .fold(0.0, f64::max)
}

/// Builds, transforms and decomposes the Hamiltonian for explicit inputs.
pub fn run_oracle_with(inputs: &OracleInputs, cutoff: usize, order: Order) -> Result<OracleResult> {
    let space = TruncatedSpace::new(inputs.resonance.n_ions(), inputs.modes.n_modes(), cutoff)?;
    let h = build_hamiltonian(inputs, &space, order)?;
    let h_tilde = polaron_transform(&h, inputs);
    let (leak, unitarity_defect) = truncation_diagnostics(inputs, &space);
    if leak > LEAKAGE_THRESHOLD {
        log::warn!("displaced vacuum leaks {leak:.2e} into the cutoff shell");
    }
    Ok(OracleResult {
        space,
        order,
        extracted: extract_coefficients(&h_tilde),
        analytic: analytic_coefficients(inputs, &space, order)?,
        truncation_error_estimate: leak,
        truncation_flagged: leak > LEAKAGE_THRESHOLD,
        unitarity_defect,
        spectrum_defect: (space.block_dim() <= SPECTRUM_CHECK_LIMIT).then(|| spectrum_defect(&h, &h_tilde)),
    })
}

/// Oracle run on the axial data of `model`, in the rotating frame.
pub fn run_oracle(model: &ChainModel, cutoff: usize, order: Order) -> Result<OracleResult> {
    run_oracle_with(&OracleInputs::from_model(model), cutoff, order)
}
