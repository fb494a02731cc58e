use nalgebra::DMatrix;

use super::{annihilation, embed, OracleInputs, SpinBlockOperator, TruncatedSpace};

/// Spin-dependent displacements `beta_l = 1/2 sum_n eps_nl s_n`.
pub fn displacement(inputs: &OracleInputs, s: &[f64]) -> Vec<f64> {
    let eps = &inputs.eps.eps;
    (0..eps.ncols())
        .map(|l| 0.5 * (0..eps.nrows()).map(|n| eps[(n, l)] * s[n]).sum::<f64>())
        .collect()
}

/// `exp(beta (a^dag - a))` in the truncated single-mode space.
fn displacement_operator(beta: f64, levels: usize) -> DMatrix<f64> {
    let a = annihilation(levels);
    ((a.transpose() - a) * beta).exp()
}

fn mode_unitaries(inputs: &OracleInputs, space: &TruncatedSpace, b: usize) -> Vec<DMatrix<f64>> {
    displacement(inputs, &space.spins(b))
        .into_iter()
        .map(|beta| displacement_operator(beta, space.levels()))
        .collect()
}

/// Per-block polaron unitary, assembled as a Kronecker product of
/// single-mode displacements (exact also in the truncated space, since the
/// generator is a Kronecker sum).
pub fn polaron_unitary(inputs: &OracleInputs, space: &TruncatedSpace) -> SpinBlockOperator {
    let blocks = (0..space.n_spin_configs())
        .map(|b| {
            mode_unitaries(inputs, space, b)
                .iter()
                .fold(DMatrix::from_element(1, 1, 1.0), |acc, u| acc.kronecker(u))
        })
        .collect();
    SpinBlockOperator {
        space: *space,
        blocks,
    }
}

/// `exp(G)` of the full anti-symmetric generator `sum_s P_s sum_l beta_l(s)
/// (a_l^dag - a_l)`, by one dense exponential of the whole space.
pub fn full_space_unitary(inputs: &OracleInputs, space: &TruncatedSpace) -> DMatrix<f64> {
    let a = annihilation(space.levels());
    let gen1 = a.transpose() - a;
    let gens: Vec<DMatrix<f64>> = (0..space.n_modes).map(|l| embed(&gen1, l, space)).collect();
    let d = space.block_dim();
    let mut g = DMatrix::zeros(space.dimension, space.dimension);
    for b in 0..space.n_spin_configs() {
        let beta = displacement(inputs, &space.spins(b));
        let mut block = DMatrix::zeros(d, d);
        for (l, gl) in gens.iter().enumerate() {
            block += gl * beta[l];
        }
        g.view_mut((b * d, b * d), (d, d)).copy_from(&block);
    }
    g.exp()
}

/// `W` acting on mode `l` of the row index: `H'[p, q] = sum_k W[p_l, k] H[p(l<-k), q]`.
fn apply_rows(h: &DMatrix<f64>, w: &DMatrix<f64>, l: usize, space: &TruncatedSpace) -> DMatrix<f64> {
    let levels = space.levels();
    let stride = levels.pow((space.n_modes - 1 - l) as u32);
    let d = h.nrows();
    let mut out = DMatrix::zeros(d, h.ncols());
    for (src, dst) in h.as_slice().chunks(d).zip(out.as_mut_slice().chunks_mut(d)) {
        for (p, slot) in dst.iter_mut().enumerate() {
            let pl = (p / stride) % levels;
            let base = p - pl * stride;
            *slot = (0..levels).map(|k| w[(pl, k)] * src[base + k * stride]).sum();
        }
    }
    out
}

/// `U^T H U` block by block, applying the single-mode factors one at a time.
pub fn polaron_transform(h: &SpinBlockOperator, inputs: &OracleInputs) -> SpinBlockOperator {
    let space = &h.space;
    let blocks = h
        .blocks
        .iter()
        .enumerate()
        .map(|(b, block)| {
            let us = mode_unitaries(inputs, space, b);
            let mut m = block.clone();
            for (l, u) in us.iter().enumerate() {
                m = apply_rows(&m, &u.transpose(), l, space);
            }
            // right multiplication by U is the row action of U^T on M^T
            let mut mt = m.transpose();
            for (l, u) in us.iter().enumerate() {
                mt = apply_rows(&mt, &u.transpose(), l, space);
            }
            let m = mt.transpose();
            (&m + m.transpose()) * 0.5
        })
        .collect();
    SpinBlockOperator {
        space: *space,
        blocks,
    }
}

/// `U^T a_l U` per spin block.
pub fn shifted_annihilation(inputs: &OracleInputs, space: &TruncatedSpace, l: usize) -> SpinBlockOperator {
    let al = embed(&annihilation(space.levels()), l, space);
    let u = polaron_unitary(inputs, space);
    let blocks = u.blocks.iter().map(|ub| ub.transpose() * &al * ub).collect();
    SpinBlockOperator {
        space: *space,
        blocks,
    }
}
